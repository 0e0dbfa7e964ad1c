// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "../tools/commands.hpp"

#include "fit2/mission.hpp"
#include "fit2/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace fit2;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome
{
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body)
{
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Shared dataset and model for criteria 4-6.
const Dataset& sonar788()
{
    static const Dataset d = generate_dataset({}, {}, {}).data;
    return d;
}

TrainConfig c5_config()
{
    TrainConfig cfg;
    cfg.rules = 6;
    cfg.seed = 1;
    return cfg;
}

Outcome criterion1()
{
    const auto t0 = Clock::now();
    Rng rng(20240101, "acceptance-1");
    constexpr int instances = 100000;
    double worst = 0.0;
    std::size_t bad = 0;
    std::vector<FiringInterval<double>> f;
    std::vector<double> w;
    for (int i = 0; i < instances; ++i) {
        const auto m = static_cast<std::size_t>(1 + rng.below(12));
        f.resize(m);
        w.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            double a = rng.uniform();
            double b = rng.uniform();
            if (a > b)
                std::swap(a, b);
            f[j] = {a, b};
            w[j] = rng.uniform(-10, 10);
        }
        const std::span<const FiringInterval<double>> fs(f);
        const std::span<const double> ws(w);
        const auto sc = sc_reduce<double>(fs, ws);
        const auto km = km_reduce<double>(fs, ws);
        const auto bf = brute_force_reduce<double>(fs, ws);
        const double d = std::max({std::abs(sc.y_l - bf.y_l), std::abs(sc.y_r - bf.y_r), std::abs(km.y_l - bf.y_l),
                                   std::abs(km.y_r - bf.y_r), std::abs(sc.y_l - km.y_l), std::abs(sc.y_r - km.y_r)});
        worst = std::max(worst, d);
        if (!(d <= 1e-9))
            ++bad;
    }
    const double secs = seconds_since(t0);
    return {bad == 0 && secs < 60.0,
            fmt("%d instances, M in 1..12, max |diff| %.3g (tol 1e-9), %zu violations, %.1f s (limit 60)", instances,
                worst, bad, secs)};
}

Outcome criterion2()
{
    const auto bench = cli::bench_reducers(6, 100000, 2);
    const bool calls_ok = bench.violations == 0 && bench.sc_median_ns <= bench.km_median_ns;

    DatasetSpec spec;
    spec.wall = 5000;
    spec.corner = 5000;
    spec.seed = 2;
    const Dataset big = generate_dataset({}, {}, spec).data;
    TrainConfig cfg = c5_config();
    // The pseudoinverse solves are shared and dominate; the reducer saves only a few percent. Scheduling noise
    // only ever adds time, so compare the fastest of interleaved repeats.
    constexpr int repeats = 9;
    std::vector<double> sc_s, km_s;
    int passes = 0;
    for (int r = 0; r < repeats; ++r) {
        const auto sc = fit_fit2felm(big, cfg);
        const auto km = fit_it2felm_km(big, cfg);
        sc_s.push_back(sc.train_seconds);
        km_s.push_back(km.train_seconds);
        passes = sc.passes;
    }
    std::ranges::sort(sc_s);
    std::ranges::sort(km_s);
    const double sc_med = sc_s[repeats / 2];
    const double km_med = km_s[repeats / 2];
    const bool train_ok = sc_s.front() <= km_s.front();
    return {calls_ok && train_ok,
            fmt("M=6 median per call: SC %.0f ns, KM %.0f ns, WM %.0f ns; fastest training time of %d runs on %zu "
                "samples: SC %.3f s, KM %.3f s (medians %.3f s, %.3f s; %d passes)",
                bench.sc_median_ns, bench.km_median_ns, bench.wm_median_ns, repeats, big.samples(), sc_s.front(),
                km_s.front(), sc_med, km_med, passes)};
}

Outcome criterion3()
{
    const Dataset& d = sonar788();
    const auto folds = stratified_folds(d, 5, 3);
    double worst = 0.0;
    std::size_t points = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        std::vector<Eigen::Index> tr, te;
        for (std::size_t i = 0; i < folds.size(); ++i)
            (folds[i] == k ? te : tr).push_back(static_cast<Eigen::Index>(i));
        Dataset train_set;
        train_set.X = d.X(tr, Eigen::all);
        train_set.T = d.T(tr);
        train_set.feature_names = d.feature_names;
        TrainConfig cfg = c5_config();
        cfg.seed = 10 + k;
        cfg.init.fou_min = 0.0;
        cfg.init.fou_max = 0.0;
        const auto it2 = fit_fit2felm(train_set, cfg);
        const auto t1 = fit_t1felm(train_set, cfg);
        const Matrix Xte = d.X(te, Eigen::all);
        const Vector a = predict_rows(it2.model, Xte);
        const Vector b = predict_rows(t1.model, Xte);
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
        points += te.size();
    }
    return {worst <= 1e-6, fmt("%zu test points over 5 folds, max |diff| %.3g (tol 1e-6)", points, worst)};
}

Outcome criterion4()
{
    const auto fit = fit_fit2felm(sonar788(), c5_config());
    const auto& model = std::get<TSKModel>(fit.model);
    const Matrix& Q = model.consequents();
    Vector q(Q.size());
    for (Eigen::Index j = 0; j < Q.rows(); ++j)
        q.segment(j * Q.cols(), Q.cols()) = Q.row(j).transpose();
    const auto ranges = feature_ranges(sonar788());
    Rng rng(4, "acceptance-4");
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Vector x(5);
        for (Eigen::Index k = 0; k < 5; ++k) {
            const auto& r = ranges[static_cast<std::size_t>(k)];
            x(k) = rng.uniform(r.min, r.max);
        }
        const auto tr = reduce(model, x);
        const auto f = model_firings(model, x);
        const Vector phi = phi_coefficients(f, tr.z_l, tr.z_r);
        const double via_h = build_h_row(x, phi, model.bias()).dot(q);
        worst = std::max(worst, std::abs(predict(model, x) - via_h));
    }
    return {worst <= 1e-12, fmt("1000 random points, max |predict - H row . vec(Q)| %.3g (tol 1e-12)", worst)};
}

Outcome criterion5()
{
    const auto t0 = Clock::now();
    const Dataset& d = sonar788();
    const TrainConfig cfg = c5_config();
    const auto sc = cross_validate(d, cfg, Trainer::fit2felm, 5);
    const auto km = cross_validate(d, cfg, Trainer::it2felm_km, 5);
    const auto t1 = cross_validate(d, cfg, Trainer::t1felm, 5);
    const auto elm = cross_validate(d, cfg, Trainer::elm, 5);

    // Same seed, same folds: the two IT2 trainers must agree coefficient by coefficient.
    const auto a = std::get<TSKModel>(fit_fit2felm(d, cfg).model);
    const auto b = std::get<TSKModel>(fit_it2felm_km(d, cfg).model);
    const double coef = (a.consequents() - b.consequents()).cwiseAbs().maxCoeff();
    const double secs = seconds_since(t0);

    const double it2 = std::min(sc.mean_test_accuracy, km.mean_test_accuracy);
    const bool floor_ok = sc.mean_test_accuracy >= 0.90;
    const bool equal_ok = coef <= 1e-9 && std::abs(sc.mean_test_accuracy - km.mean_test_accuracy) <= 1e-9;
    const bool order_ok = elm.mean_test_accuracy < t1.mean_test_accuracy && t1.mean_test_accuracy <= it2;
    std::string why;
    if (!floor_ok)
        why += " floor missed;";
    if (!equal_ok)
        why += " IT2 variants differ;";
    if (!order_ok)
        why += " ordering ELM < T1 <= IT2 does not hold;";
    return {floor_ok && equal_ok && order_ok && secs < 60.0,
            fmt("5-fold mean test accuracy: FIT2-FELM %.4f (sd %.4f, floor 0.90), IT2-KM %.4f, T1-FELM %.4f, ELM "
                "%.4f; IT2 coefficient diff %.3g (tol 1e-9); %.1f s (limit 60);%s",
                sc.mean_test_accuracy, sc.std_test_accuracy, km.mean_test_accuracy, t1.mean_test_accuracy,
                elm.mean_test_accuracy, coef, secs, why.c_str())};
}

Outcome criterion6()
{
    const auto fit = fit_fit2felm(sonar788(), c5_config());
    const MissionConfig cfg;
    const auto t0 = Clock::now();
    const auto a = run_mission(cfg, fit.model);
    const double secs = seconds_since(t0);
    const auto b = run_mission(cfg, fit.model);
    std::ostringstream la, lb;
    write_mission_csv(la, a.records);
    write_mission_csv(lb, b.records);
    const bool same = la.str() == lb.str();
    const auto& s = a.summary;
    const bool all_circuits = s.circuits_per_depth.size() == 2 && s.circuits_per_depth[0] == cfg.circuits &&
                              s.circuits_per_depth[1] == cfg.circuits;
    const bool ok = s.completed && all_circuits && s.collisions == 0 && s.mean_abs_edge_error <= 0.15 &&
                    s.classification_accuracy >= 0.85 && same && secs < 60.0;
    return {ok, fmt("completed %s, circuits %zu+%zu, collisions %zu, mean |edge error| %.4f m once acquired (limit "
                    "0.15; %.4f m over all follow steps), classification accuracy %.4f (floor 0.85), deterministic "
                    "%s, %.0f s simulated in %.1f s",
                    s.completed ? "yes" : "no", s.circuits_per_depth.empty() ? 0 : s.circuits_per_depth[0],
                    s.circuits_per_depth.size() < 2 ? 0 : s.circuits_per_depth[1], s.collisions,
                    s.mean_abs_edge_error, s.mean_abs_edge_error_all, s.classification_accuracy,
                    same ? "yes" : "no", s.sim_time, secs)};
}

Outcome criterion7()
{
    // Odd symmetry of the default rule base.
    Rng rng(7, "acceptance-7");
    std::size_t asym = 0;
    for (const auto& c : {FPDConfig{}, FPDConfig::heading_default(), FPDConfig::depth_default(),
                          FPDConfig::edge_default()}) {
        for (int i = 0; i < 10000; ++i) {
            FPDState s{rng.uniform(-2, 2), rng.uniform(-1, 1), 0};
            const FPDState m{-s.prev_error, -s.prev_output, 0};
            const double e = rng.uniform(-3, 3);
            if (controller_step_error(c, s, e).u != -controller_step_error(c, m, -e).u)
                ++asym;
        }
    }

    // Depth step 0 -> 2 m on the vehicle model, depth controller driving heave.
    const MissionConfig mc;
    VehicleState v;
    v.depth = 0.0;
    FPDState ds;
    const double ref = 2.0;
    double worst_after = 0.0;
    double peak = 0.0;
    double settle_t = -1.0;
    for (int k = 0; k < 1200; ++k) {
        const auto r = controller_step(mc.controllers.depth, ds, ref, v.depth);
        ds = r.state;
        v = step_vehicle(v, {0.0, 0.0, r.u}, mc.dt, mc.vehicle, mc.tank);
        const double err = std::abs(ref - v.depth);
        peak = std::max(peak, v.depth);
        if (err <= 0.05 && settle_t < 0.0)
            settle_t = v.t;
        if (settle_t >= 0.0)
            worst_after = std::max(worst_after, err);
    }
    const bool step_ok = settle_t >= 0.0 && worst_after <= 0.05 && peak <= ref + 0.05;

    // Wu-Mendel bounds bracket the KM endpoints.
    std::size_t bracket_bad = 0;
    std::vector<FiringInterval<double>> f;
    std::vector<double> w;
    for (int i = 0; i < 10000; ++i) {
        const auto m = static_cast<std::size_t>(1 + rng.below(12));
        f.resize(m);
        w.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double up = rng.uniform(0.01, 1.0);
            f[j] = {up * rng.uniform(0.01, 1.0), up};
            w[j] = rng.uniform(-10, 10);
        }
        const std::span<const FiringInterval<double>> fs(f);
        const std::span<const double> ws(w);
        const auto km = km_reduce<double>(fs, ws);
        const auto b = wm_bounds<double>(fs, ws);
        const double tol = 1e-9;
        if (!(b.outer_l <= km.y_l + tol && km.y_l <= b.inner_l + tol && b.inner_r <= km.y_r + tol &&
              km.y_r <= b.outer_r + tol))
            ++bracket_bad;
    }
    return {asym == 0 && step_ok && bracket_bad == 0,
            fmt("odd-symmetry mismatches %zu of 40000; depth step to 2 m within 0.05 m after %.1f s, worst error "
                "afterwards %.4f m, peak %.4f m; WM bracketing failures %zu of 10000",
                asym, settle_t, worst_after, peak, bracket_bad)};
}

Outcome criterion8()
{
    Rng rng(8, "acceptance-8");
    std::size_t ls_bad = 0;
    std::size_t norm_bad = 0;
    std::size_t deficient = 0;
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Index rows = 2 + static_cast<Eigen::Index>(rng.below(30));
        const Eigen::Index cols = 1 + static_cast<Eigen::Index>(rng.below(20));
        Matrix H(rows, cols);
        const bool low_rank = i % 2 == 1;
        if (low_rank) {
            const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng.below(
                                           static_cast<std::uint64_t>(std::max<Eigen::Index>(1, std::min(rows, cols) - 1))));
            const Matrix A = Matrix::NullaryExpr(rows, r, [&] { return rng.normal(); });
            const Matrix B = Matrix::NullaryExpr(r, cols, [&] { return rng.normal(); });
            H = A * B;
        } else {
            H = Matrix::NullaryExpr(rows, cols, [&] { return rng.normal(); });
        }
        const Vector T = Vector::NullaryExpr(rows, [&] { return rng.normal(); });
        const Vector q = pseudoinverse_solve(H, T);
        const double base = (H * q - T).norm();
        const double scale = 1e-12 * (1.0 + T.norm());
        for (int p = 0; p < 20; ++p) {
            const Vector d = Vector::NullaryExpr(cols, [&] { return rng.normal(0.0, 1e-3); });
            if ((H * (q + d) - T).norm() < base - scale)
                ++ls_bad;
        }
        // Null space from an independent SVD.
        Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeFullV);
        const double tol = svd.singularValues().size() ? 1e-10 * svd.singularValues()(0) : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
            rank += svd.singularValues()(k) > tol ? 1 : 0;
        if (rank < cols) {
            ++deficient;
            const Matrix N = svd.matrixV().rightCols(cols - rank);
            for (int p = 0; p < 20; ++p) {
                const Vector v = N * Vector::NullaryExpr(cols - rank, [&] { return rng.normal(); });
                if ((q + v).norm() < q.norm() - 1e-9 * (1.0 + q.norm()))
                    ++norm_bad;
            }
        }
    }
    return {ls_bad == 0 && norm_bad == 0 && deficient > 0,
            fmt("1000 systems (%zu rank-deficient): residual decreases under perturbation %zu times, null-space "
                "moves shrink the norm %zu times",
                deficient, ls_bad, norm_bad)};
}

} // namespace

int main()
{
    report(1, "type-reduction oracle equivalence", criterion1);
    report(2, "SC speed ordering", criterion2);
    report(3, "type-1 degeneration", criterion3);
    report(4, "inference/training consistency", criterion4);
    report(5, "classification at desk scale", criterion5);
    report(6, "mission completion", criterion6);
    report(7, "controller properties", criterion7);
    report(8, "least-squares optimality and minimum norm", criterion8);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
