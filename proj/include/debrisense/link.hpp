#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "debrisense/channel.hpp"

namespace debrisense {

using Bits = std::vector<std::uint8_t>;

struct SnrConfig {
    double snr_db = 15.0;

    double linear() const { return std::pow(10.0, snr_db / 10.0); }
};

class FramingError : public Error {
public:
    using Error::Error;
};

class EqualizationError : public Error {
public:
    using Error::Error;
};

/// Gray-mapped QPSK: the first bit of each pair sets the sign of I, the
/// second the sign of Q (0 -> +, 1 -> -). Symbols fill the Nt x T frame
/// time-major: symbol k goes to stream k % Nt at time k / Nt.
CMatrix qpsk_modulate(const Bits& bits, int n_streams);
Bits qpsk_demodulate(const CMatrix& symbols);

struct ReceivedFrame {
    CMatrix y;
    double noise_variance = 0.0;
};

/// Noise variance giving the requested average per-receive-antenna SNR for
/// unit-energy symbols sent with per-stream amplitude 1/sqrt(Nt).
double noise_variance_for_snr(const CMatrix& h, double snr_db);

/// y = H x / sqrt(Nt) + n.
ReceivedFrame transmit(const CMatrix& h, const CMatrix& frame, const SnrConfig& snr, std::uint64_t seed);

enum class CsiMethod { Perfect, LeastSquares };

std::string to_string(CsiMethod m);
CsiMethod csi_method_from_string(const std::string& s);

struct PilotConfig {
    CsiMethod method = CsiMethod::LeastSquares;
    /// Pilot length in symbols; 0 selects the default 2 Nt.
    int length = 0;
};

struct CsiEstimate {
    CMatrix matrix;
    CsiMethod method = CsiMethod::Perfect;
    /// Per-entry variance of the estimation error.
    double pilot_noise_variance = 0.0;
};

/// Least-squares estimate from an orthogonal DFT pilot block at the given SNR.
CsiEstimate estimate_csi(const CMatrix& h_true, const PilotConfig& pilots, const SnrConfig& snr, std::uint64_t seed);

/// Zero forcing: pinv(csi) * y. Throws EqualizationError when the smallest
/// singular value is below 1e-12 of the largest.
CMatrix zf_equalize(const CMatrix& y, const CsiEstimate& csi);

double compute_ber(const Bits& tx, const Bits& rx);

/// Gaussian tail probability Q(x).
double q_function(double x);

struct LinkResult {
    double ber = 0.0;
    std::size_t bits = 0;
    std::vector<CsiEstimate> csi;  // one per sub-band
    bool equalization_failed = false;
};

/// Sends frame_symbols QPSK symbols per antenna, time slots assigned to
/// sub-bands round-robin, each sub-band with its own noise level and CSI
/// estimate. Sub-bands whose CSI is rank deficient count as BER 0.5.
LinkResult simulate_link(const std::vector<CMatrix>& subbands, const SnrConfig& snr, int frame_symbols,
                         const PilotConfig& pilots, std::uint64_t seed);

}  // namespace debrisense
