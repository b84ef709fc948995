#include "nsaf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <memory>
#include <stdexcept>
#include <thread>
#include <variant>

#include "nsaf/adaptive.hpp"
#include "nsaf/decomposer.hpp"
#include "nsaf/filterbank.hpp"
#include "nsaf/theory.hpp"

namespace nsaf {
namespace {

constexpr double kDeviationFloor = 1e-30;

// Seed streams within one run.
constexpr std::uint64_t kInputStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kPathStream = 3;

struct Runner {
    std::variant<Nsaf, Josr> filter;
    bool full_band;
    StepReport last{};

    std::span<const double> weights() const {
        return std::visit([](const auto& f) { return f.weights(); }, filter);
    }
};

std::size_t run_length(const ExperimentConfig& config, const SignalBuffer& input) {
    if (config.input.kind == InputKind::wav && config.total_samples == 0) return input.size();
    return config.total_samples;
}

std::optional<std::size_t> resolve_change(const ExperimentConfig& config, std::size_t total) {
    if (config.change_at_middle) return middle_change_sample(total, config.subbands);
    return config.change_at;
}

std::vector<Runner> make_runners(const ExperimentConfig& config, double noise_variance, double input_power) {
    std::vector<Runner> runners;
    runners.reserve(config.algorithms.size());
    for (const auto& a : config.algorithms) {
        const std::size_t n_sub = a.full_band() ? 1 : config.subbands;
        switch (a.kind) {
            case AlgorithmKind::nsaf:
            case AlgorithmKind::nlms: {
                const double delta = a.delta_input_var ? *a.delta_input_var * input_power : a.delta;
                runners.push_back({Nsaf(config.taps, n_sub, NsafConfig{a.mu, delta}), a.full_band(), {}});
                break;
            }
            case AlgorithmKind::josr:
            case AlgorithmKind::jo_nlms:
                runners.push_back({Josr(config.taps, n_sub, noise_variance, a.noise_split), a.full_band(), {}});
                break;
        }
    }
    return runners;
}

AnalysisBank experiment_bank(const ExperimentConfig& config) {
    return make_default_bank(config.subbands, config.overlap);
}

RunResult run_with_bank(const ExperimentConfig& config, const AnalysisBank& bank, const EchoPath& path, RngSeed seed,
                        const RunOptions& options) {
    SignalBuffer input = experiment_input(config, derive_seed(seed, kInputStream));
    const std::size_t total = run_length(config, input);
    if (total > input.size())
        throw std::invalid_argument("run: input has " + std::to_string(input.size()) + " samples, config asks for " +
                                    std::to_string(total));
    input.samples.resize(total);
    if (total < config.subbands) throw std::invalid_argument("run: input shorter than one frame");

    const auto change = resolve_change(config, total);
    const PathSchedule schedule{path, change};
    const SystemOutput system = system_response(schedule, input, config.snr_db, derive_seed(seed, kNoiseStream));

    auto runners = make_runners(config, system.noise_variance, input.power());
    const bool any_full = std::any_of(runners.begin(), runners.end(), [](const Runner& r) { return r.full_band; });
    const bool any_sub = std::any_of(runners.begin(), runners.end(), [](const Runner& r) { return !r.full_band; });

    std::optional<SubbandDecomposer> full_dec;
    std::optional<SubbandDecomposer> sub_dec;
    if (any_full) full_dec.emplace(AnalysisBank::identity(), config.taps);
    if (any_sub) sub_dec.emplace(bank, config.taps);

    const std::size_t n_sub = config.subbands;
    const std::size_t iterations = total / n_sub;
    RunResult result;
    result.subbands = n_sub;
    result.names.reserve(config.algorithms.size());
    for (const auto& a : config.algorithms) result.names.push_back(a.name);
    result.deviation.assign(runners.size(), {});
    result.traces.assign(runners.size(), std::nullopt);
    for (std::size_t a = 0; a < runners.size(); ++a) {
        result.deviation[a].reserve(iterations);
        if (options.record_traces && std::holds_alternative<Josr>(runners[a].filter)) result.traces[a].emplace();
    }

    SubbandFrame full_frame;
    SubbandFrame sub_frame;
    for (std::size_t n = 0; n < iterations * n_sub; ++n) {
        const double u = input.samples[n];
        const double d = system.desired[n];
        if (full_dec && full_dec->push_samples(u, d, full_frame)) {
            for (auto& r : runners)
                if (r.full_band) std::visit([&](auto& f) { f.step(full_frame, r.last); }, r.filter);
        }
        if (sub_dec && sub_dec->push_samples(u, d, sub_frame)) {
            for (auto& r : runners)
                if (!r.full_band) std::visit([&](auto& f) { f.step(sub_frame, r.last); }, r.filter);
        }
        if ((n + 1) % n_sub != 0) continue;

        const double sign = schedule.sign_at(n);
        if (sign < 0.0 && !result.change_iteration) result.change_iteration = n / n_sub;
        for (std::size_t a = 0; a < runners.size(); ++a) {
            result.deviation[a].push_back(normalized_deviation(path, sign, runners[a].weights()));
            if (result.traces[a]) {
                const auto& josr = std::get<Josr>(runners[a].filter);
                auto& trace = *result.traces[a];
                trace.msd.push_back(josr.msd());
                trace.m_sigma_q2.push_back(josr.m_sigma_q2());
                trace.contraction.push_back(runners[a].last.contraction.value_or(1.0));
            }
        }
    }
    return result;
}

std::vector<double> curve_db(const std::vector<double>& linear) {
    std::vector<double> out(linear.size());
    std::transform(linear.begin(), linear.end(), out.begin(), to_db);
    return out;
}

}  // namespace

double to_db(double linear) noexcept {
    return 10.0 * std::log10(std::max(linear, kDeviationFloor));
}

double normalized_deviation(const EchoPath& reference, double sign, std::span<const double> w) {
    if (w.size() != reference.size())
        throw std::invalid_argument("nmsd: weight length " + std::to_string(w.size()) + " vs path length " +
                                    std::to_string(reference.size()));
    double dev = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double diff = sign * reference[j] - w[j];
        dev += diff * diff;
    }
    return dev / reference.energy();
}

double nmsd(const EchoPath& reference, std::span<const double> w) {
    return to_db(normalized_deviation(reference, 1.0, w));
}

std::vector<double> RunResult::nmsd_db(std::size_t algorithm) const { return curve_db(deviation.at(algorithm)); }

std::vector<double> MonteCarloResult::nmsd_db(std::size_t algorithm) const {
    return curve_db(mean_deviation.at(algorithm));
}

std::size_t MonteCarloResult::index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("no algorithm named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

EchoPath experiment_path(const ExperimentConfig& config) {
    const RngSeed seed = derive_seed(RngSeed{config.path_seed.value_or(config.base_seed)}, kPathStream);
    return make_echo_path(config.taps, config.echo_decay, seed);
}

SignalBuffer experiment_input(const ExperimentConfig& config, RngSeed seed) {
    switch (config.input.kind) {
        case InputKind::ar1: {
            const double pole = config.input.pole;
            const double innovation = config.input.innovation_variance.value_or(1.0 - pole * pole);
            return gen_ar1(pole, config.total_samples, innovation, seed);
        }
        case InputKind::wgn:
            return gen_wgn(config.input.variance, config.total_samples, seed);
        case InputKind::wav:
            return load_wav(config.input.path);
    }
    throw std::logic_error("unhandled input kind");
}

RunResult run_single(const ExperimentConfig& config, RngSeed seed, const RunOptions& options) {
    config.validate();
    return run_with_bank(config, experiment_bank(config), experiment_path(config), seed, options);
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config) {
    config.validate();
    const std::size_t runs = config.effective_runs();
    const AnalysisBank bank = experiment_bank(config);
    const EchoPath path = experiment_path(config);

    std::vector<std::optional<RunResult>> results(runs);
    std::vector<std::exception_ptr> failures(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                results[r] = run_with_bank(config, bank, path, RngSeed{config.base_seed + r}, {});
            } catch (...) {
                failures[r] = std::current_exception();
            }
        }
    };
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, runs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t r = 0; r < runs; ++r) {
        if (!failures[r]) continue;
        try {
            std::rethrow_exception(failures[r]);
        } catch (const std::exception& e) {
            throw std::runtime_error("run with seed " + std::to_string(config.base_seed + r) + " failed: " + e.what());
        }
    }

    MonteCarloResult out;
    out.config = config;
    out.runs = runs;
    out.subbands = config.subbands;
    out.names = results.front()->names;
    out.change_iteration = results.front()->change_iteration;
    out.mean_deviation.assign(out.names.size(), std::vector<double>(results.front()->iterations(), 0.0));
    for (const auto& run : results)
        for (std::size_t a = 0; a < out.names.size(); ++a)
            for (std::size_t k = 0; k < run->deviation[a].size(); ++k) out.mean_deviation[a][k] += run->deviation[a][k];
    const double scale = 1.0 / static_cast<double>(runs);
    for (auto& curve : out.mean_deviation)
        for (auto& v : curve) v *= scale;
    return out;
}

std::optional<std::size_t> iterations_to_reach(std::span<const double> curve_db, double threshold_db,
                                               std::size_t window) {
    if (window == 0) throw std::invalid_argument("iterations_to_reach: window must be >= 1");
    double sum = 0.0;
    for (std::size_t k = 0; k < curve_db.size(); ++k) {
        sum += curve_db[k];
        if (k >= window) sum -= curve_db[k - window];
        const std::size_t count = std::min(k + 1, window);
        if (sum / static_cast<double>(count) <= threshold_db) return k;
    }
    return std::nullopt;
}

double terminal_nmsd(std::span<const double> curve_db, std::optional<std::size_t> end) {
    const std::size_t stop = std::min(end.value_or(curve_db.size()), curve_db.size());
    if (stop == 0) throw std::invalid_argument("terminal_nmsd: empty curve");
    const std::size_t count = std::max<std::size_t>(1, stop / 10);
    double sum = 0.0;
    for (std::size_t k = stop - count; k < stop; ++k) sum += curve_db[k];
    return sum / static_cast<double>(count);
}

CurveSet to_curves(const MonteCarloResult& result) {
    CurveSet set{result.names, {}};
    for (std::size_t a = 0; a < result.names.size(); ++a) set.values_db.push_back(result.nmsd_db(a));
    return set;
}

CurveSet to_curves(const RunResult& result) {
    CurveSet set{result.names, {}};
    for (std::size_t a = 0; a < result.names.size(); ++a) set.values_db.push_back(result.nmsd_db(a));
    return set;
}

CurveSet predict(const ExperimentConfig& config) {
    config.validate();
    const EchoPath path = experiment_path(config);
    const std::size_t n_sub = config.subbands;
    const std::size_t m = config.taps;

    std::function<double(std::size_t)> autocorr;
    std::size_t total = config.total_samples;
    double input_power = 0.0;
    switch (config.input.kind) {
        case InputKind::ar1: {
            const double pole = config.input.pole;
            const double innovation = config.input.innovation_variance.value_or(1.0 - pole * pole);
            const double var = innovation / (1.0 - pole * pole);
            autocorr = [var, pole](std::size_t lag) { return var * std::pow(pole, static_cast<double>(lag)); };
            input_power = var;
            break;
        }
        case InputKind::wgn: {
            const double var = config.input.variance;
            autocorr = [var](std::size_t lag) { return lag == 0 ? var : 0.0; };
            input_power = var;
            break;
        }
        case InputKind::wav: {
            SignalBuffer wav = load_wav(config.input.path);
            if (total == 0) total = wav.size();
            if (total > wav.size()) throw std::invalid_argument("predict: WAV file shorter than total_samples");
            wav.samples.resize(total);
            auto samples = std::make_shared<std::vector<double>>(std::move(wav.samples));
            autocorr = [samples](std::size_t lag) {
                const auto& x = *samples;
                double acc = 0.0;
                for (std::size_t n = lag; n < x.size(); ++n) acc += x[n] * x[n - lag];
                return acc / static_cast<double>(x.size());
            };
            input_power = autocorr(0);
            break;
        }
    }

    // Clean-echo power w^T R w sets the noise level exactly as system_response does.
    std::vector<double> r(m);
    for (std::size_t lag = 0; lag < m; ++lag) r[lag] = autocorr(lag);
    double clean_power = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < m; ++l) clean_power += path[j] * path[l] * r[j > l ? j - l : l - j];
    const double noise = std::isinf(config.snr_db) ? 0.0 : clean_power * std::pow(10.0, -config.snr_db / 10.0);

    const AnalysisBank bank = experiment_bank(config);
    const std::vector<double> sub_var = theory::subband_variances(bank, autocorr);
    const std::size_t iterations = total / n_sub;
    const double energy = path.energy();
    const std::optional<std::size_t> change =
        config.change_at_middle ? std::optional<std::size_t>(middle_change_sample(total, n_sub)) : config.change_at;

    CurveSet out;
    for (const auto& a : config.algorithms) {
        const bool full = a.full_band();
        const std::size_t step_samples = full ? 1 : n_sub;
        theory::SubbandStats stats;
        stats.taps = m;
        stats.sigma_u2 = full ? std::vector<double>{r[0]} : sub_var;
        const bool split = a.kind == AlgorithmKind::josr || a.kind == AlgorithmKind::jo_nlms
                               ? a.noise_split == NoiseSplit::per_subband
                               : true;
        stats.sigma_eta2_subband = split ? noise / static_cast<double>(stats.num_subbands()) : noise;

        std::function<double(double)> advance;
        if (a.kind == AlgorithmKind::nsaf || a.kind == AlgorithmKind::nlms) {
            const double delta = a.delta_input_var ? *a.delta_input_var * input_power : a.delta;
            const double h = theory::hbar(stats, {a.mu, delta});
            const double p = theory::phi(stats, {a.mu, delta});
            advance = [h, p](double msd) { return h * msd + p; };
        } else {
            advance = [stats](double msd) { return theory::beta(stats, msd) * msd; };
        }

        std::vector<double> curve;
        curve.reserve(iterations);
        double msd = energy;
        bool flipped = false;
        // One filter update per `step_samples` samples; the update ending at
        // sample s sees the flipped path once s >= change.
        for (std::size_t s = step_samples - 1; s < iterations * n_sub; s += step_samples) {
            if (change && !flipped && s >= *change) {
                msd += 4.0 * energy;
                flipped = true;
            }
            msd = std::max(0.0, advance(msd));
            if ((s + 1) % n_sub == 0) curve.push_back(to_db(msd / energy));
        }
        out.names.push_back(a.name);
        out.values_db.push_back(std::move(curve));
    }
    return out;
}

}  // namespace nsaf
