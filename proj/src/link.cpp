#include "debrisense/link.hpp"

#include <Eigen/SVD>

#include "debrisense/rng.hpp"
#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

CMatrix qpsk_modulate(const Bits& bits, int n_streams)
{
    if (n_streams < 1) throw InvalidArgument("need at least one stream");
    if (bits.size() % 2 != 0) throw FramingError("QPSK needs an even number of bits");
    const std::size_t n_symbols = bits.size() / 2;
    if (n_symbols % static_cast<std::size_t>(n_streams) != 0)
        throw FramingError("bit count must be a multiple of 2 * n_streams");
    const Eigen::Index t_len = static_cast<Eigen::Index>(n_symbols / static_cast<std::size_t>(n_streams));
    CMatrix x(n_streams, t_len);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        double re = bits[2 * k] ? -kInvSqrt2 : kInvSqrt2;
        double im = bits[2 * k + 1] ? -kInvSqrt2 : kInvSqrt2;
        x(static_cast<Eigen::Index>(k % static_cast<std::size_t>(n_streams)),
          static_cast<Eigen::Index>(k / static_cast<std::size_t>(n_streams))) = {re, im};
    }
    return x;
}

Bits qpsk_demodulate(const CMatrix& symbols)
{
    Bits bits;
    bits.reserve(static_cast<std::size_t>(symbols.size()) * 2);
    for (Eigen::Index t = 0; t < symbols.cols(); ++t)
        for (Eigen::Index s = 0; s < symbols.rows(); ++s) {
            bits.push_back(symbols(s, t).real() < 0.0 ? 1 : 0);
            bits.push_back(symbols(s, t).imag() < 0.0 ? 1 : 0);
        }
    return bits;
}

double noise_variance_for_snr(const CMatrix& h, double snr_db)
{
    if (std::isnan(snr_db)) throw InvalidArgument("SNR must not be NaN");
    if (std::isinf(snr_db)) return snr_db > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (h.size() == 0) throw DimensionError("empty channel");
    double signal = h.squaredNorm() / static_cast<double>(h.cols()) / static_cast<double>(h.rows());
    return signal / std::pow(10.0, snr_db / 10.0);
}

ReceivedFrame transmit(const CMatrix& h, const CMatrix& frame, const SnrConfig& snr, std::uint64_t seed)
{
    if (h.cols() != frame.rows()) throw DimensionError("frame width does not match the number of transmit antennas");
    ReceivedFrame out;
    out.noise_variance = noise_variance_for_snr(h, snr.snr_db);
    const double gamma = 1.0 / std::sqrt(static_cast<double>(h.cols()));
    out.y = gamma * (h * frame);
    if (out.noise_variance > 0.0) {
        Rng rng(seed);
        for (Eigen::Index t = 0; t < out.y.cols(); ++t)
            for (Eigen::Index r = 0; r < out.y.rows(); ++r) out.y(r, t) += complex_normal(rng, out.noise_variance);
    }
    return out;
}

std::string to_string(CsiMethod m) { return m == CsiMethod::Perfect ? "perfect" : "least_squares"; }

CsiMethod csi_method_from_string(const std::string& s)
{
    std::string k = to_lower(trim(s));
    if (k == "perfect") return CsiMethod::Perfect;
    if (k == "least_squares" || k == "ls") return CsiMethod::LeastSquares;
    throw ConfigError("unknown CSI method '" + s + "'");
}

CsiEstimate estimate_csi(const CMatrix& h_true, const PilotConfig& pilots, const SnrConfig& snr, std::uint64_t seed)
{
    const Eigen::Index nt = h_true.cols();
    const Eigen::Index nr = h_true.rows();
    CsiEstimate est;
    est.method = pilots.method;
    if (pilots.method == CsiMethod::Perfect) {
        est.matrix = h_true;
        return est;
    }
    const Eigen::Index len = pilots.length == 0 ? 2 * nt : pilots.length;
    if (len < nt) throw ConfigError("pilot length must be >= number of transmit antennas");

    const double sigma2 = noise_variance_for_snr(h_true, snr.snr_db);
    est.pilot_noise_variance = sigma2 / static_cast<double>(len);
    if (sigma2 == 0.0) {
        est.matrix = h_true;
        return est;
    }
    // Orthogonal DFT pilots: P P^H = L I, so the LS estimate is Y P^H / L.
    CMatrix p(nt, len);
    for (Eigen::Index s = 0; s < nt; ++s)
        for (Eigen::Index l = 0; l < len; ++l)
            p(s, l) = std::polar(1.0, wrap_cycles(-static_cast<double>(s * l) / static_cast<double>(len)));
    Rng rng(seed);
    CMatrix noise(nr, len);
    for (Eigen::Index l = 0; l < len; ++l)
        for (Eigen::Index r = 0; r < nr; ++r) noise(r, l) = complex_normal(rng, sigma2);
    CMatrix y = h_true * p + noise;
    est.matrix = (y * p.adjoint()) / static_cast<double>(len);
    return est;
}

CMatrix zf_equalize(const CMatrix& y, const CsiEstimate& csi)
{
    const CMatrix& h = csi.matrix;
    if (h.rows() != y.rows()) throw DimensionError("CSI rows do not match received frame");
    if (h.rows() < h.cols()) throw EqualizationError("zero forcing needs n_rx >= n_tx");
    Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(sv.size() - 1) > 1.0e-12 * sv(0)))
        throw EqualizationError("CSI matrix is rank deficient");
    Eigen::VectorXd inv = sv.cwiseInverse();
    CMatrix pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    return pinv * y;
}

double compute_ber(const Bits& tx, const Bits& rx)
{
    if (tx.size() != rx.size()) throw InvalidArgument("bit streams differ in length");
    if (tx.empty()) throw InvalidArgument("empty bit streams");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errors += (tx[i] != rx[i]) ? 1u : 0u;
    return static_cast<double>(errors) / static_cast<double>(tx.size());
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

LinkResult simulate_link(const std::vector<CMatrix>& subbands, const SnrConfig& snr, int frame_symbols,
                         const PilotConfig& pilots, std::uint64_t seed)
{
    if (subbands.empty()) throw InvalidArgument("need at least one sub-band channel");
    if (frame_symbols < 1) throw ConfigError("frame length must be >= 1 symbol");
    const int nt = static_cast<int>(subbands.front().cols());
    const std::size_t n_sub = subbands.size();

    Rng bit_rng(derive_seed(seed, {0}));
    Bits bits(static_cast<std::size_t>(2 * nt * frame_symbols));
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& b : bits) b = static_cast<std::uint8_t>(coin(bit_rng));
    const CMatrix frame = qpsk_modulate(bits, nt);

    LinkResult result;
    result.bits = bits.size();
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n_sub; ++i) {
        const CMatrix& h = subbands[i];
        if (h.cols() != nt) throw DimensionError("sub-band channels differ in transmit dimension");
        result.csi.push_back(estimate_csi(h, pilots, snr, derive_seed(seed, {1, i})));

        std::vector<Eigen::Index> slots;
        for (Eigen::Index t = static_cast<Eigen::Index>(i); t < frame.cols(); t += static_cast<Eigen::Index>(n_sub))
            slots.push_back(t);
        if (slots.empty()) continue;
        CMatrix x(nt, static_cast<Eigen::Index>(slots.size()));
        for (std::size_t k = 0; k < slots.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = frame.col(slots[k]);

        ReceivedFrame rx = transmit(h, x, snr, derive_seed(seed, {2, i}));
        Bits sent = qpsk_demodulate(x);
        try {
            Bits got = qpsk_demodulate(zf_equalize(rx.y, result.csi.back()));
            for (std::size_t k = 0; k < sent.size(); ++k) errors += sent[k] != got[k] ? 1u : 0u;
        } catch (const EqualizationError&) {
            result.equalization_failed = true;
            errors += sent.size() / 2;
        }
    }
    result.ber = static_cast<double>(errors) / static_cast<double>(result.bits);
    return result;
}

}  // namespace debrisense
