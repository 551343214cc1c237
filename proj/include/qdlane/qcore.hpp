// Dense state-vector / density-matrix simulation for one or two qubits.
//
// Qubit 0 is the most significant bit of a basis index, so the basis label
// "10" (index 2) means qubit 0 is |1> and qubit 1 is |0>.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdlane::qc {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr int kMaxQubits = 2;

namespace detail {

inline void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("qubit count must be 1 or 2, got " + std::to_string(n));
    }
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Lifts a single-qubit operator to the full register.
inline CMatrix embed(const CMatrix& op, int target, int num_qubits) {
    if (target < 0 || target >= num_qubits) {
        throw std::invalid_argument("target qubit " + std::to_string(target) + " out of range");
    }
    CMatrix full = CMatrix::Identity(1, 1);
    for (int q = 0; q < num_qubits; ++q) {
        full = kron(full, q == target ? op : CMatrix(CMatrix::Identity(2, 2)));
    }
    return full;
}

} // namespace detail

class PureState {
public:
    PureState(int num_qubits, CVector amplitudes)
        : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
        detail::check_qubit_count(num_qubits_);
        if (amplitudes_.size() != (Eigen::Index{1} << num_qubits_)) {
            throw std::invalid_argument("amplitude vector length must be 2^num_qubits");
        }
        if (!amplitudes_.allFinite()) {
            throw std::invalid_argument("amplitudes must be finite");
        }
        if (std::abs(amplitudes_.norm() - 1.0) > kAlgebraTol) {
            throw std::invalid_argument("state is not normalized");
        }
    }

    static PureState zero(int num_qubits) {
        detail::check_qubit_count(num_qubits);
        CVector v = CVector::Zero(Eigen::Index{1} << num_qubits);
        v(0) = 1.0;
        return PureState(num_qubits, std::move(v));
    }

    int num_qubits() const noexcept { return num_qubits_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    const CVector& amplitudes() const noexcept { return amplitudes_; }
    double probability(Eigen::Index basis) const { return std::norm(amplitudes_(basis)); }

private:
    friend PureState apply_unitary(const PureState&, const CMatrix&);
    struct unchecked_t {};
    PureState(unchecked_t, int n, CVector v) : num_qubits_(n), amplitudes_(std::move(v)) {}

    int num_qubits_;
    CVector amplitudes_;
};

class DensityMatrix {
public:
    DensityMatrix(int num_qubits, CMatrix matrix)
        : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
        detail::check_qubit_count(num_qubits_);
        const Eigen::Index d = Eigen::Index{1} << num_qubits_;
        if (matrix_.rows() != d || matrix_.cols() != d) {
            throw std::invalid_argument("density matrix must be 2^n x 2^n");
        }
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
            throw std::invalid_argument("density matrix is not Hermitian");
        }
        if (std::abs(matrix_.trace() - cplx(1.0)) > kAlgebraTol) {
            throw std::invalid_argument("density matrix trace is not 1");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix_, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -kPsdTol) {
            throw std::invalid_argument("density matrix has a negative eigenvalue");
        }
    }

    static DensityMatrix zero(int num_qubits) { return from_state(PureState::zero(num_qubits)); }

    static DensityMatrix from_state(const PureState& s) {
        return DensityMatrix(unchecked_t{}, s.num_qubits(), s.amplitudes() * s.amplitudes().adjoint());
    }

    int num_qubits() const noexcept { return num_qubits_; }
    const CMatrix& matrix() const noexcept { return matrix_; }

    // Measurement probabilities in the computational basis.
    std::vector<double> probabilities() const {
        std::vector<double> p(static_cast<std::size_t>(matrix_.rows()));
        for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
            p[static_cast<std::size_t>(i)] = std::max(0.0, matrix_(i, i).real());
        }
        return p;
    }

private:
    friend DensityMatrix conjugate(const DensityMatrix&, const CMatrix&);
    friend DensityMatrix apply_kraus(const DensityMatrix&, const std::vector<CMatrix>&);
    struct unchecked_t {};
    DensityMatrix(unchecked_t, int n, CMatrix m) : num_qubits_(n), matrix_(std::move(m)) {}

    int num_qubits_;
    CMatrix matrix_;
};

struct Gate {
    CMatrix matrix;
    std::string label;

    int arity() const { return matrix.rows() == 2 ? 1 : 2; }
};

inline Gate make_gate(CMatrix m, std::string label) {
    if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4)) {
        throw std::invalid_argument("gate must be 2x2 or 4x4");
    }
    if ((m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() > kAlgebraTol) {
        throw std::invalid_argument("gate " + label + " is not unitary");
    }
    return Gate{std::move(m), std::move(label)};
}

inline Gate ry(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("ry: angle must be finite");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    CMatrix m(2, 2);
    m << c, -s,
         s,  c;
    return Gate{std::move(m), "ry"};
}

inline Mat2 pauli_i() { return Mat2::Identity(); }
inline Mat2 pauli_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 pauli_y() { Mat2 m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Mat2 pauli_z() { Mat2 m; m << 1, 0, 0, -1; return m; }

inline Gate cz() {
    CMatrix m = CMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return Gate{std::move(m), "cz"};
}

inline PureState apply_unitary(const PureState& s, const CMatrix& u) {
    return PureState(PureState::unchecked_t{}, s.num_qubits(), u * s.amplitudes());
}

// Applies a one-qubit gate to `target`.
inline PureState apply_gate(const PureState& s, const Gate& g, int target) {
    if (g.arity() != 1) throw std::invalid_argument("apply_gate: two-qubit gate needs no target");
    return apply_unitary(s, detail::embed(g.matrix, target, s.num_qubits()));
}

// Applies a gate acting on the whole register (e.g. CZ on two qubits).
inline PureState apply_gate(const PureState& s, const Gate& g) {
    if (g.matrix.rows() != s.dim()) throw std::invalid_argument("apply_gate: gate dimension mismatch");
    return apply_unitary(s, g.matrix);
}

inline DensityMatrix conjugate(const DensityMatrix& rho, const CMatrix& u) {
    return DensityMatrix(DensityMatrix::unchecked_t{}, rho.num_qubits(), u * rho.matrix() * u.adjoint());
}

inline DensityMatrix apply_gate(const DensityMatrix& rho, const Gate& g, int target) {
    if (g.arity() != 1) throw std::invalid_argument("apply_gate: two-qubit gate needs no target");
    return conjugate(rho, detail::embed(g.matrix, target, rho.num_qubits()));
}

inline DensityMatrix apply_gate(const DensityMatrix& rho, const Gate& g) {
    if (g.matrix.rows() != rho.matrix().rows()) throw std::invalid_argument("apply_gate: gate dimension mismatch");
    return conjugate(rho, g.matrix);
}

// ---------------------------------------------------------------------------
// Noise channels

enum class ChannelKind { BitFlip, PhaseFlip, BitPhaseFlip, Depolarizing, AmplitudeDamping, PhaseDamping };

inline constexpr ChannelKind kAllChannels[] = {
    ChannelKind::BitFlip,          ChannelKind::PhaseFlip,   ChannelKind::BitPhaseFlip,
    ChannelKind::Depolarizing,     ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping,
};

inline std::string_view to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::BitFlip: return "bit_flip";
        case ChannelKind::PhaseFlip: return "phase_flip";
        case ChannelKind::BitPhaseFlip: return "bit_phase_flip";
        case ChannelKind::Depolarizing: return "depolarizing";
        case ChannelKind::AmplitudeDamping: return "amplitude_damping";
        case ChannelKind::PhaseDamping: return "phase_damping";
    }
    return "?";
}

inline ChannelKind parse_channel(std::string_view name) {
    for (ChannelKind k : kAllChannels) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown channel '" + std::string(name) + "'");
}

// Phase damping's no-jump operator. `Identity` is sqrt(1-p) I, which makes
// p = 0 the identity channel. `SignFlipZ` is sqrt(1-p) Z; it still satisfies
// completeness but at p = 0 it conjugates by Z, flipping coherence signs.
enum class PhaseDampingForm { Identity, SignFlipZ };

struct KrausChannel {
    ChannelKind kind;
    double p;
    std::vector<Mat2> operators;

    // Sum_i E_i^dagger E_i.
    Mat2 completeness() const {
        Mat2 sum = Mat2::Zero();
        for (const auto& e : operators) sum += e.adjoint() * e;
        return sum;
    }
};

inline KrausChannel make_channel(ChannelKind kind, double p,
                                 PhaseDampingForm pd_form = PhaseDampingForm::Identity) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("channel probability must lie in [0,1]");
    }
    const double keep = std::sqrt(1.0 - p);
    const double flip = std::sqrt(p);
    std::vector<Mat2> ops;
    switch (kind) {
        case ChannelKind::BitFlip:
            ops = {keep * pauli_i(), flip * pauli_x()};
            break;
        case ChannelKind::PhaseFlip:
            ops = {keep * pauli_i(), flip * pauli_z()};
            break;
        case ChannelKind::BitPhaseFlip:
            ops = {keep * pauli_i(), flip * pauli_y()};
            break;
        case ChannelKind::Depolarizing: {
            const double q = std::sqrt(p / 4.0);
            ops = {std::sqrt(1.0 - 3.0 * p / 4.0) * pauli_i(), q * pauli_z(), q * pauli_x(), q * pauli_y()};
            break;
        }
        case ChannelKind::AmplitudeDamping: {
            Mat2 decay = Mat2::Zero();
            decay(0, 1) = flip;
            Mat2 stay = Mat2::Zero();
            stay(0, 0) = 1.0;
            stay(1, 1) = keep;
            ops = {decay, stay};
            break;
        }
        case ChannelKind::PhaseDamping: {
            Mat2 p0 = Mat2::Zero();
            p0(0, 0) = flip;
            Mat2 p1 = Mat2::Zero();
            p1(1, 1) = flip;
            const Mat2 base = pd_form == PhaseDampingForm::Identity ? pauli_i() : pauli_z();
            ops = {keep * base, p0, p1};
            break;
        }
    }
    return KrausChannel{kind, p, std::move(ops)};
}

inline DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<CMatrix>& ops) {
    CMatrix out = CMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (const auto& e : ops) out += e * rho.matrix() * e.adjoint();
    return DensityMatrix(DensityMatrix::unchecked_t{}, rho.num_qubits(), std::move(out));
}

// rho' = sum_i E_i rho E_i^dagger with each E_i acting on `target`.
inline DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, int target) {
    std::vector<CMatrix> lifted;
    lifted.reserve(ch.operators.size());
    for (const auto& e : ch.operators) lifted.push_back(detail::embed(e, target, rho.num_qubits()));
    return apply_kraus(rho, lifted);
}

// ---------------------------------------------------------------------------
// Measurement

struct MeasurementResult {
    std::vector<double> probabilities;
    std::optional<std::vector<std::int64_t>> shot_counts;
    std::int64_t shots = 0;

    // Probability of outcome `basis`: empirical when shots were taken.
    double frequency(std::size_t basis) const {
        if (shot_counts && shots > 0) return static_cast<double>((*shot_counts)[basis]) / static_cast<double>(shots);
        return probabilities[basis];
    }
};

// Multinomial draw via sequential conditional binomials.
inline std::vector<std::int64_t> sample_counts(const std::vector<double>& probs, std::int64_t shots,
                                               std::mt19937_64& rng) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    std::int64_t remaining = shots;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
        const double q = mass_left > 0.0 ? std::clamp(probs[i] / mass_left, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::int64_t> draw(remaining, q);
        counts[i] = draw(rng);
        remaining -= counts[i];
        mass_left -= probs[i];
    }
    counts.back() += remaining;
    return counts;
}

inline MeasurementResult measure_probabilities(std::vector<double> probs, std::int64_t shots, std::uint64_t seed) {
    if (shots < 0) throw std::invalid_argument("shots must be non-negative");
    double total = 0.0;
    for (double& p : probs) {
        p = std::max(0.0, p);
        total += p;
    }
    for (double& p : probs) p /= total;
    MeasurementResult r{std::move(probs), std::nullopt, shots};
    if (shots > 0) {
        std::mt19937_64 rng(seed);
        r.shot_counts = sample_counts(r.probabilities, shots, rng);
    }
    return r;
}

inline MeasurementResult measure(const PureState& s, std::int64_t shots, std::uint64_t seed) {
    std::vector<double> probs(static_cast<std::size_t>(s.dim()));
    for (Eigen::Index i = 0; i < s.dim(); ++i) probs[static_cast<std::size_t>(i)] = s.probability(i);
    return measure_probabilities(std::move(probs), shots, seed);
}

inline MeasurementResult measure(const DensityMatrix& rho, std::int64_t shots, std::uint64_t seed) {
    return measure_probabilities(rho.probabilities(), shots, seed);
}

// ---------------------------------------------------------------------------
// Circuits

// A gate plus the qubits it touches (target for one-qubit gates, every
// qubit for a register-wide gate).
struct Operation {
    Gate gate;
    std::vector<int> qubits;
};

class Circuit {
public:
    explicit Circuit(int num_qubits) : num_qubits_(num_qubits) { detail::check_qubit_count(num_qubits); }

    Circuit& add(Gate g, int target) {
        if (g.arity() != 1) throw std::invalid_argument("Circuit::add: expected a one-qubit gate");
        if (target < 0 || target >= num_qubits_) throw std::invalid_argument("Circuit::add: target out of range");
        ops_.push_back(Operation{std::move(g), {target}});
        return *this;
    }

    Circuit& add_register(Gate g) {
        if (g.matrix.rows() != (Eigen::Index{1} << num_qubits_)) {
            throw std::invalid_argument("Circuit::add_register: gate dimension mismatch");
        }
        std::vector<int> all(static_cast<std::size_t>(num_qubits_));
        for (int q = 0; q < num_qubits_; ++q) all[static_cast<std::size_t>(q)] = q;
        ops_.push_back(Operation{std::move(g), std::move(all)});
        return *this;
    }

    int num_qubits() const noexcept { return num_qubits_; }
    const std::vector<Operation>& operations() const noexcept { return ops_; }

    PureState run() const {
        PureState s = PureState::zero(num_qubits_);
        for (const auto& op : ops_) {
            s = op.gate.arity() == 1 ? apply_gate(s, op.gate, op.qubits.front()) : apply_gate(s, op.gate);
        }
        return s;
    }

    // Density-matrix run with `noise` applied to every touched qubit after
    // each gate.
    DensityMatrix run(const KrausChannel& noise) const {
        DensityMatrix rho = DensityMatrix::zero(num_qubits_);
        for (const auto& op : ops_) {
            rho = op.gate.arity() == 1 ? apply_gate(rho, op.gate, op.qubits.front()) : apply_gate(rho, op.gate);
            for (int q : op.qubits) rho = apply_channel(rho, noise, q);
        }
        return rho;
    }

private:
    int num_qubits_;
    std::vector<Operation> ops_;
};

} // namespace qdlane::qc
