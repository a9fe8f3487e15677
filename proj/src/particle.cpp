#include "mfg/particle.hpp"

#include "mfg/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

namespace mfg {

namespace {

constexpr std::size_t kBlock = 4096;

struct JumpPlan {
    double rate = 0.0;
    std::vector<double> sizes;
    std::vector<double> weights;
    double drift = 0.0;
    double small_variance = 0.0;
};

JumpPlan plan_from(const SimulationInput& in) {
    JumpPlan p;
    if (in.jumps == nullptr) return p;
    for (const JumpBin& b : in.jumps->bins) {
        const double w = b.compensated_mass + b.plain_mass;
        if (w <= 0.0) continue;
        p.sizes.push_back(static_cast<double>(b.offset) * in.grid.dx);
        p.weights.push_back(w);
        p.rate += w;
    }
    p.drift = in.jumps->drift;
    p.small_variance = in.jumps->small_jump_variance;
    return p;
}

double sample_linear_cell(double a, double b, double u) {
    // density proportional to a + (b - a) s on [0, 1]
    const double d = b - a;
    if (std::fabs(d) <= 1e-14 * std::max(a, b)) return u;
    const double total = 0.5 * (a + b);
    return (-a + std::sqrt(a * a + 2.0 * d * u * total)) / d;
}

struct BlockOutput {
    std::vector<std::uint32_t> counts;  // (nt+1) x nodes
    std::vector<std::uint32_t> alive;   // per level
};

} // namespace

void ParticleConfig::validate() const {
    if (n == 0) throw Error(ErrorKind::parameter, "particle count must be positive");
    if (substeps == 0) throw Error(ErrorKind::parameter, "particle substeps must be positive");
}

std::size_t thread_budget(std::size_t requested) {
    std::size_t n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MFG_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(n, 1);
}

std::span<const double> SimulationResult::density(std::size_t level) const {
    return std::span<const double>(histogram).subspan(level * cols, cols);
}

double interpolate(const Grid& grid, std::span<const double> f, double x) {
    if (x <= 0.0) return f.front();
    if (x >= grid.x_max) return f.back();
    const double s = x / grid.dx;
    const std::size_t i = std::min(static_cast<std::size_t>(s), grid.last() - 1);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * f[i] + w * f[i + 1];
}

SimulationResult simulate(const SimulationInput& in, const ParticleConfig& cfg) {
    cfg.validate();
    const Grid& grid = in.grid;
    if (in.policy == nullptr) throw Error(ErrorKind::parameter, "simulation needs a policy field");
    if (in.policy->levels() != grid.nt + 1 || in.policy->cols() != grid.nodes()) {
        throw Error(ErrorKind::dimension, "policy field does not match the grid");
    }
    if (!in.terminal.empty()) check_profile(grid, in.terminal, "terminal profile");
    if (cfg.start == StartMode::density) check_profile(grid, in.m0, "start density");

    const JumpPlan plan = plan_from(in);
    const double s2 = in.sigma * in.sigma + plan.small_variance;
    const double sd = std::sqrt(s2);
    const std::size_t nodes = grid.nodes();
    const std::size_t levels = grid.nt + 1;
    const double h = grid.dt / static_cast<double>(cfg.substeps);

    std::vector<double> cell_mass;
    if (cfg.start == StartMode::density) {
        for (std::size_t i = 0; i + 1 < nodes; ++i) cell_mass.push_back(0.5 * (in.m0[i] + in.m0[i + 1]));
        double total = 0.0;
        for (double c : cell_mass) total += c;
        if (!(total > 0.0)) throw Error(ErrorKind::parameter, "start density has no mass");
    }

    SimulationResult res;
    res.n = cfg.n;
    res.cols = nodes;
    res.start.assign(cfg.n, 0.0);
    res.payoff.assign(cfg.n, 0.0);
    const std::size_t blocks = (cfg.n + kBlock - 1) / kBlock;
    std::vector<BlockOutput> outputs(blocks);

    auto run_block = [&](std::size_t block) {
        std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(block)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::poisson_distribution<int> njumps(plan.rate * h > 0.0 ? plan.rate * h : 1.0);
        std::discrete_distribution<std::size_t> pick(plan.weights.begin(), plan.weights.end());
        std::discrete_distribution<std::size_t> pick_cell(cell_mass.begin(), cell_mass.end());

        BlockOutput& out = outputs[block];
        out.counts.assign(levels * nodes, 0);
        out.alive.assign(levels, 0);
        const std::size_t first = block * kBlock;
        const std::size_t last = std::min(cfg.n, first + kBlock);

        for (std::size_t p = first; p < last; ++p) {
            double x = 0.0;
            switch (cfg.start) {
                case StartMode::density: {
                    const std::size_t c = pick_cell(rng);
                    x = (static_cast<double>(c) + sample_linear_cell(in.m0[c], in.m0[c + 1], unif(rng))) * grid.dx;
                    break;
                }
                case StartMode::uniform: x = unif(rng) * grid.x_max; break;
                case StartMode::point: x = cfg.start_point; break;
            }
            res.start[p] = x;
            double pay = 0.0;
            bool alive = x > 0.0 && x <= grid.x_max;
            auto record = [&](std::size_t level) {
                if (!alive) return;
                const double s = x / grid.dx;
                const std::size_t bin = std::min(static_cast<std::size_t>(std::floor(s + 0.5)), nodes - 1);
                ++out.counts[level * nodes + bin];
                ++out.alive[level];
            };
            record(0);
            for (std::size_t n = 0; n < grid.nt && alive; ++n) {
                const auto qrow = in.policy->row(n);
                for (std::size_t k = 0; k < cfg.substeps && alive; ++k) {
                    const double t = grid.t(n) + static_cast<double>(k) * h;
                    if (in.revenue != nullptr) {
                        pay += std::exp(-in.r * t) * interpolate(grid, in.revenue->row(n), x) * h;
                    }
                    const double q = interpolate(grid, qrow, x);
                    double y = x + (-q - plan.drift) * h + sd * std::sqrt(h) * normal(rng);
                    if (plan.rate > 0.0) {
                        const int jumps = njumps(rng);
                        for (int j = 0; j < jumps; ++j) y += plan.sizes[pick(rng)];
                    }
                    bool absorbed = y <= 0.0;
                    if (!absorbed && cfg.bridge && s2 > 0.0) {
                        absorbed = unif(rng) < std::exp(-2.0 * x * y / (s2 * h));
                    }
                    if (absorbed) {
                        alive = false;
                        break;
                    }
                    // u is held constant past x_max, which is a reflecting wall for the value
                    if (y > grid.x_max) y = std::max(2.0 * grid.x_max - y, 0.5 * grid.x_max);
                    x = y;
                }
                record(n + 1);
            }
            if (alive && !in.terminal.empty()) {
                pay += std::exp(-in.r * grid.horizon) * interpolate(grid, in.terminal, x);
            }
            res.payoff[p] = pay;
        }
    };

    const std::size_t workers = std::min(thread_budget(cfg.threads), blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < blocks; b += workers) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    res.histogram.assign(levels * nodes, 0.0);
    res.eta_hat.assign(levels, 0.0);
    const double scale = 1.0 / (static_cast<double>(cfg.n) * grid.dx);
    for (const BlockOutput& out : outputs) {
        for (std::size_t k = 0; k < out.counts.size(); ++k) res.histogram[k] += out.counts[k];
        for (std::size_t l = 0; l < levels; ++l) res.eta_hat[l] += out.alive[l];
    }
    for (std::size_t l = 0; l < levels; ++l) {
        for (std::size_t i = 0; i < nodes; ++i) {
            // end bins only cover half a cell inside the domain
            const double width = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
            res.histogram[l * nodes + i] *= scale / width;
        }
        res.eta_hat[l] /= static_cast<double>(cfg.n);
    }
    return res;
}

std::vector<BinScore> value_check(const Grid& grid, const Field& u, const SimulationResult& sim,
                                  std::size_t bins, std::size_t min_count) {
    if (bins == 0) throw Error(ErrorKind::parameter, "value_check needs at least one bin");
    std::vector<BinScore> out(bins);
    std::vector<double> sum(bins, 0.0), sq(bins, 0.0), pde(bins, 0.0);
    const double width = grid.x_max / static_cast<double>(bins);
    const auto u0 = u.row(0);
    for (std::size_t p = 0; p < sim.start.size(); ++p) {
        const double x = sim.start[p];
        if (!(x > 0.0 && x <= grid.x_max)) continue;
        const std::size_t b = std::min(static_cast<std::size_t>(x / width), bins - 1);
        ++out[b].count;
        sum[b] += sim.payoff[p];
        sq[b] += sim.payoff[p] * sim.payoff[p];
        pde[b] += interpolate(grid, u0, x);
    }
    for (std::size_t b = 0; b < bins; ++b) {
        BinScore& s = out[b];
        s.x_lo = static_cast<double>(b) * width;
        s.x_hi = s.x_lo + width;
        s.flagged = s.count < min_count;
        if (s.count == 0) continue;
        const double n = static_cast<double>(s.count);
        s.mc_mean = sum[b] / n;
        s.pde_mean = pde[b] / n;
        const double var = s.count > 1 ? std::max(sq[b] / n - s.mc_mean * s.mc_mean, 0.0) * n / (n - 1.0) : 0.0;
        s.mc_stderr = std::sqrt(var / n);
        const double diff = s.mc_mean - s.pde_mean;
        if (s.mc_stderr > 0.0) s.z = diff / s.mc_stderr;
        else s.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return out;
}

double histogram_l1(const Grid& grid, const SimulationResult& sim, std::span<const double> m, std::size_t level) {
    check_profile(grid, m, "density profile");
    const auto h = sim.density(level);
    Profile diff(grid.nodes());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::fabs(h[i] - m[i]);
    return integrate(grid, diff);
}

} // namespace mfg
