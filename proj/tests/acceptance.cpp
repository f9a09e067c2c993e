// Acceptance suite: exercises the toolkit end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "streamcore/parser.hpp"
#include "streamcore/streamcore.hpp"
#include "streamcore/testkit.hpp"

using namespace streamcore;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path specs_dir;

Specification load(const std::string& name) {
    return parse_spec(read_file(specs_dir / name));
}

std::set<size_t> presence(const StreamTrace& trace, const StreamVar& var) {
    std::set<size_t> out;
    for (size_t n = 0; n < trace.horizon(); ++n)
        if (trace.at(var, n).has_value()) out.insert(n);
    return out;
}

StreamTrace sensor_trace() {
    StreamTrace t(6);
    t.set_column(input_var("battery_level"),
                 {std::nullopt, OptValue(100), std::nullopt, OptValue(97), std::nullopt,
                  OptValue(95)});
    t.set_column(input_var("temperature"),
                 {std::nullopt, std::nullopt, OptValue(48), OptValue(52), OptValue(55),
                  std::nullopt});
    return t;
}

// --------------------------------------------------------------------------
// Criterion 1: verdict table for the bundled example specifications.
// --------------------------------------------------------------------------

void criterion_1() {
    auto start = Clock::now();
    std::vector<std::string> problems;

    auto expect = [&](const std::string& what, bool condition) {
        if (!condition) problems.push_back(what);
    };

    Specification power = load("power_draw.sc");
    expect("power_draw v1", check_spec(power, TypeMode::V1, true).ok());
    expect("power_draw v2", check_spec(power, TypeMode::V2, true).ok());

    for (const char* name : {"temp_sync.sc", "temp_hold.sc", "temp_disjunctive.sc"}) {
        Specification s = load(name);
        expect(std::string(name) + " v1", check_spec(s, TypeMode::V1, true).ok());
        expect(std::string(name) + " v2", check_spec(s, TypeMode::V2, true).ok());
    }

    Specification invalid = load("invalid.sc");
    for (TypeMode mode : {TypeMode::V1, TypeMode::V2}) {
        TypingReport r = check_spec(invalid, mode, true);
        expect("invalid rejected", !r.ok());
        bool refinement_a_b = false;
        for (const auto& e : r.errors)
            if (e.kind == TypeError::Kind::RefinementFailure && format_pacing(e.tau_must) == "a" &&
                format_pacing(e.tau_can) == "b")
                refinement_a_b = true;
        expect("invalid fails with a |/= b", refinement_a_b);
    }

    Specification ordering = load("ordering_wrong.sc");
    expect("ordering_wrong rejected without reorder",
           !check_spec(ordering, TypeMode::V2, false).ok());
    expect("ordering_wrong accepted with reorder",
           check_spec(ordering, TypeMode::V2, true).ok());

    Specification avg = load("running_average.sc");
    expect("running_average rejected in v1", !check_spec(avg, TypeMode::V1, true).ok());
    expect("running_average accepted in v2", check_spec(avg, TypeMode::V2, true).ok());

    double elapsed = seconds_since(start);
    expect("runtime under 1 s", elapsed < 1.0);

    std::string detail = "7 specs, " + std::to_string(elapsed) + " s";
    if (!problems.empty()) detail += "; first problem: " + problems.front();
    report(1, "example-specification verdict table", problems.empty(), detail);
}

// --------------------------------------------------------------------------
// Criterion 2: timing patterns on the asynchronous sensor trace.
// --------------------------------------------------------------------------

void criterion_2() {
    StreamTrace sensors = sensor_trace();
    const StreamVar warning = output_var("temp_warning");
    std::vector<std::string> problems;

    struct Case {
        const char* file;
        std::set<size_t> expected;
    };
    for (const Case& c : {Case{"temp_sync.sc", {3}}, Case{"temp_hold.sc", {1, 3, 5}},
                          Case{"temp_disjunctive.sc", {1, 2, 3, 4, 5}}}) {
        RunResult r = run(load(c.file), sensors);
        if (!r.ok()) {
            problems.push_back(std::string(c.file) + " did not run");
            continue;
        }
        if (presence(*r.trace, warning) != c.expected)
            problems.push_back(std::string(c.file) + " produced the wrong presence set");
    }
    report(2, "timing-pattern reproduction", problems.empty(),
           problems.empty() ? "sync {3}, hold {1,3,5}, disjunctive {1,2,3,4,5}"
                            : problems.front());
}

// --------------------------------------------------------------------------
// Criterion 3: value-level golden results, cross-checked on two code paths.
// --------------------------------------------------------------------------

void criterion_3() {
    std::vector<std::string> problems;

    auto column_is = [&](const StreamTrace& t, const char* name,
                         const std::vector<Value>& expected) {
        const StreamVar var = output_var(name);
        if (t.horizon() != expected.size()) return false;
        for (size_t n = 0; n < expected.size(); ++n)
            if (t.at(var, n) != OptValue(expected[n])) return false;
        return true;
    };

    {
        Specification power = load("power_draw.sc");
        StreamTrace battery(3);
        battery.set_column(input_var("battery_level"), {OptValue(100), OptValue(98), OptValue(95)});
        RunResult r = run(power, battery);
        TypingReport report = check_spec(power, TypeMode::V2, true);
        StreamTrace oracle = testkit::whole_stream_construct(power, battery, report);
        if (!r.ok() || !column_is(*r.trace, "drain", {0, 2, 3}))
            problems.push_back("drain != [0,2,3] (evaluator)");
        if (!column_is(oracle, "drain", {0, 2, 3}))
            problems.push_back("drain != [0,2,3] (whole-stream)");
    }
    {
        Specification avg = load("running_average.sc");
        StreamTrace counter(3);
        counter.set_column(input_var("i"), {OptValue(4), OptValue(6), OptValue(10)});
        RunResult r = run(avg, counter);
        TypingReport report = check_spec(avg, TypeMode::V2, true);
        StreamTrace oracle = testkit::whole_stream_construct(avg, counter, report);
        for (const StreamTrace* t : {&*r.trace, &oracle}) {
            if (!column_is(*t, "count", {1, 2, 3}) || !column_is(*t, "sum", {4, 10, 20}) ||
                !column_is(*t, "average", {4, 5, 6}))
                problems.push_back("running average mismatch");
        }
    }
    report(3, "value-level golden tests", problems.empty(),
           problems.empty() ? "drain [0,2,3]; count/sum/average exact on both code paths"
                            : problems.front());
}

// --------------------------------------------------------------------------
// Criteria 4 and 5c: safety suite over the generated corpus, with the
// whole-stream oracle compared cell by cell on every case.
// --------------------------------------------------------------------------

struct CorpusStats {
    size_t runs = 0;
    size_t failures = 0;
    size_t oracle_mismatches = 0;
    double elapsed = 0;
    std::string first_problem;
};

CorpusStats run_safety_corpus() {
    CorpusStats stats;
    auto start = Clock::now();
    const double densities[] = {0.0, 0.3, 0.7, 1.0};

    for (TypeMode mode : {TypeMode::V1, TypeMode::V2}) {
        for (size_t i = 0; i < 500; ++i) {
            testkit::GenConfig cfg;
            cfg.seed = 0xace0 + i + (mode == TypeMode::V2 ? 1000000 : 0);
            cfg.num_inputs = 1 + i % 4;
            cfg.num_equations = i % 9;
            cfg.max_expr_depth = 1 + i % 4;
            cfg.horizon = 1 + (i * 7) % 50;
            cfg.mode = mode;

            Specification spec = testkit::gen_well_typed_spec(cfg);
            TypingReport report = check_spec(spec, mode, true);
            if (!report.ok()) {
                ++stats.failures;
                if (stats.first_problem.empty())
                    stats.first_problem = "generated spec rejected (seed " +
                                          std::to_string(cfg.seed) + ")";
                continue;
            }

            for (double density : densities) {
                testkit::GenConfig trace_cfg = cfg;
                trace_cfg.seed = cfg.seed * 4 + static_cast<std::uint64_t>(density * 10);
                trace_cfg.presence_density = density;
                StreamTrace inputs = testkit::gen_trace(trace_cfg, spec.inputs);

                ++stats.runs;
                try {
                    RunResult r = run(spec, inputs, mode, true);
                    if (!r.ok() || !r.diagnostics.empty() ||
                        !is_model(*r.trace, spec).is_model) {
                        ++stats.failures;
                        if (stats.first_problem.empty())
                            stats.first_problem =
                                "run not a clean model (seed " + std::to_string(cfg.seed) + ")";
                        continue;
                    }
                    StreamTrace oracle = testkit::whole_stream_construct(spec, inputs, report);
                    if (!(*r.trace == oracle)) {
                        ++stats.oracle_mismatches;
                        if (stats.first_problem.empty())
                            stats.first_problem =
                                "online/offline mismatch (seed " + std::to_string(cfg.seed) + ")";
                    }
                } catch (const std::exception& e) {
                    ++stats.failures;
                    if (stats.first_problem.empty())
                        stats.first_problem = std::string("exception: ") + e.what();
                }
            }
        }
    }
    stats.elapsed = seconds_since(start);
    return stats;
}

void criteria_4_and_5c(const CorpusStats& stats) {
    bool pass4 = stats.failures == 0 && stats.runs == 4000 && stats.elapsed < 60.0;
    report(4, "safety property suite", pass4,
           std::to_string(stats.runs) + " runs, " + std::to_string(stats.failures) +
               " failures, " + std::to_string(stats.elapsed) + " s" +
               (stats.first_problem.empty() ? "" : "; " + stats.first_problem));
}

// --------------------------------------------------------------------------
// Criterion 5: oracle equivalences.
// --------------------------------------------------------------------------

bool entails_sweep(std::string& detail) {
    const std::vector<StreamVar> atom_vars{input_var("a"), input_var("b"), input_var("c"),
                                           input_var("d")};
    std::vector<PacingPtr> family = testkit::enumerate_formulas(3, atom_vars);

    // Depth <= 3 subfamily: crossed exhaustively below.
    std::function<size_t(const PacingPtr&)> depth = [&](const PacingPtr& f) -> size_t {
        return std::visit(overload{
                              [](const PacingAtom&) -> size_t { return 1; },
                              [](const PacingTop&) -> size_t { return 1; },
                              [&](const PacingAnd& an) {
                                  return 1 + std::max(depth(an.lhs), depth(an.rhs));
                              },
                              [&](const PacingOr& o) {
                                  return 1 + std::max(depth(o.lhs), depth(o.rhs));
                              },
                          },
                          f->node());
    };
    std::vector<PacingPtr> shallow;
    for (const auto& f : family)
        if (depth(f) <= 3) shallow.push_back(f);

    std::atomic<size_t> disagreements{0};
    std::atomic<size_t> pairs{0};

    auto compare = [&](const PacingPtr& t1, const PacingPtr& t2) {
        pairs.fetch_add(1, std::memory_order_relaxed);
        if (entails(t1, t2) != testkit::entails_bruteforce(t1, t2))
            disagreements.fetch_add(1, std::memory_order_relaxed);
    };

    size_t worker_count = std::max(2u, std::thread::hardware_concurrency());
    {
        std::vector<std::thread> workers;
        std::atomic<size_t> next{0};
        for (size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= shallow.size()) return;
                    for (size_t j = 0; j < shallow.size(); ++j) compare(shallow[i], shallow[j]);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    // Deeper chain-shaped formulas: each member of the full family against a
    // deterministic sample of partners.
    {
        std::vector<std::thread> workers;
        std::atomic<size_t> next{0};
        for (size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= family.size()) return;
                    testkit::Rng rng(0xfeed + i);
                    for (size_t k = 0; k < 200; ++k)
                        compare(family[i], family[rng.below(family.size())]);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    // Random pairs with up to 6 atoms and deeper nesting.
    {
        const std::vector<StreamVar> six{input_var("a"), input_var("b"), input_var("c"),
                                         input_var("d"), input_var("e"), input_var("f")};
        testkit::Rng rng(0xbeef);
        for (size_t k = 0; k < 10000; ++k)
            compare(testkit::gen_raw_pacing(rng, six, 5), testkit::gen_raw_pacing(rng, six, 5));
    }

    detail = std::to_string(pairs.load()) + " pairs (" + std::to_string(shallow.size()) +
             "^2 exhaustive + sampled family of " + std::to_string(family.size()) +
             " + 10000 random), " + std::to_string(disagreements.load()) + " disagreements";
    return disagreements.load() == 0;
}

bool permutation_sweep(std::string& detail) {
    size_t disagreements = 0, samples = 0;
    testkit::Rng rng(0x0717);
    for (size_t i = 0; samples < 200 && i < 400; ++i) {
        testkit::GenConfig cfg;
        cfg.seed = 0x5eed + i;
        cfg.num_inputs = 1 + i % 4;
        cfg.num_equations = 1 + i % 5;
        cfg.max_expr_depth = 1 + i % 3;
        cfg.mode = i % 2 ? TypeMode::V1 : TypeMode::V2;

        Specification sample = testkit::gen_well_typed_spec(cfg);
        if (i % 3 == 0) sample = testkit::shuffle_equations(sample, rng);
        if (i % 3 == 2) {
            auto mutant = testkit::mutate_spec(sample, rng);
            if (!mutant || !validate_spec(*mutant).empty()) continue;
            sample = *mutant;
        }
        ++samples;
        if (check_spec(sample, cfg.mode, true).ok() !=
            testkit::check_spec_all_permutations(sample, cfg.mode))
            ++disagreements;
    }
    detail = std::to_string(samples) + " specs, " + std::to_string(disagreements) +
             " disagreements";
    return samples >= 200 && disagreements == 0;
}

void criterion_5(const CorpusStats& corpus) {
    std::string entails_detail, perm_detail;
    bool entails_ok = entails_sweep(entails_detail);
    bool perm_ok = permutation_sweep(perm_detail);
    bool oracle_ok = corpus.oracle_mismatches == 0;

    report(5, "oracle equivalences", entails_ok && perm_ok && oracle_ok,
           "entails: " + entails_detail + "; permutations: " + perm_detail +
               "; evaluator vs whole-stream: " + std::to_string(corpus.oracle_mismatches) +
               " mismatches over " + std::to_string(corpus.runs) + " runs");
}

// --------------------------------------------------------------------------
// Criterion 6: evaluation-agreement properties, 10k samples each.
// --------------------------------------------------------------------------

void criterion_6() {
    size_t partial_checked = 0, partial_violations = 0;
    size_t memcell_checked = 0, memcell_violations = 0;

    const std::vector<StreamVar> inputs{input_var("a"), input_var("b")};
    const std::vector<StreamVar> outputs{output_var("x"), output_var("y"), output_var("z")};
    std::vector<StreamVar> universe = inputs;
    universe.insert(universe.end(), outputs.begin(), outputs.end());

    testkit::Rng rng(0x1e44a);
    auto random_total = [&](size_t horizon) {
        StreamTrace t(horizon);
        for (const auto& v : universe) {
            StreamTrace::Column col(horizon);
            for (size_t n = 0; n < horizon; ++n)
                if (rng.chance(0.55)) col[n] = rng.value_in(-80, 80);
            t.set_column(v, col);
        }
        return t;
    };

    // Partial/total agreement.
    for (size_t iter = 0; iter < 10000; ++iter) {
        size_t horizon = 1 + rng.below(10);
        StreamTrace total = random_total(horizon);
        ExprPtr e = testkit::gen_raw_expr(rng, universe, 1 + rng.below(4));
        size_t n = rng.below(horizon);

        StreamTrace partial(horizon);
        for (const auto& v : inputs) partial.set_column(v, total.column(v));
        for (const auto& v : outputs)
            if (rng.chance(0.5)) partial.set_column(v, total.column(v));

        EvalOutcome p = eval_partial(e, partial, n);
        ++partial_checked;
        if (p.is_ok() && !(p == eval_total(e, total, n))) ++partial_violations;
    }

    // Memory-cell agreement, conditioned on the self stream having a value.
    size_t attempts = 0;
    while (memcell_checked < 10000 && attempts < 200000) {
        ++attempts;
        size_t horizon = 1 + rng.below(10);
        StreamTrace total = random_total(horizon);
        size_t n = rng.below(horizon);
        const StreamVar self = outputs[rng.below(outputs.size())];
        if (!total.at(self, n).has_value()) continue;

        ExprPtr e = testkit::gen_raw_expr(rng, universe, 1 + rng.below(4));
        StreamTrace rho(horizon);
        for (const auto& v : inputs) rho.set_column(v, total.column(v));
        for (const auto& v : outputs)
            if (!(v == self) && rng.chance(0.6)) rho.set_column(v, total.column(v));

        MemoryCell cell = MemoryCell::no_value();
        if (n > 0) {
            EvalOutcome last = op_last(total.column(self), n - 1);
            if (last.is_ok()) cell = MemoryCell::val(last.value());
        }
        EvalOutcome m = eval_memcell(e, rho, n, self, cell);
        ++memcell_checked;
        if (m.is_ok() && !(m == eval_total(e, total, n))) ++memcell_violations;
    }

    bool pass = partial_checked == 10000 && memcell_checked == 10000 &&
                partial_violations == 0 && memcell_violations == 0;
    report(6, "semantics agreement properties", pass,
           "partial/total: " + std::to_string(partial_violations) + "/" +
               std::to_string(partial_checked) + " violations; memory-cell: " +
               std::to_string(memcell_violations) + "/" + std::to_string(memcell_checked) +
               " violations");
}

// --------------------------------------------------------------------------
// Criterion 7: negative suite — rejected mutants demonstrably fail.
// --------------------------------------------------------------------------

void criterion_7() {
    size_t mutants = 0, rejected = 0;
    size_t refinement_mutants = 0, refinement_with_fail = 0;
    const double densities[] = {0.1, 0.3, 0.5, 0.8};

    for (std::uint64_t seed = 0; mutants < 200 && seed < 2000; ++seed) {
        testkit::GenConfig cfg;
        cfg.seed = 0xbad + seed;
        cfg.num_inputs = 2 + seed % 3;
        cfg.num_equations = 2 + seed % 6;
        cfg.max_expr_depth = 1 + seed % 3;
        cfg.mode = TypeMode::V2;

        auto mutant = testkit::gen_ill_typed_spec(cfg, /*reorder=*/false);
        if (!mutant) continue;
        ++mutants;

        TypingReport report = check_spec(*mutant, TypeMode::V2, false);
        if (!report.ok()) ++rejected;

        if (!testkit::rejects_with_refinement_only(report)) continue;
        ++refinement_mutants;

        bool found_fail = false;
        for (size_t t = 0; t < 50 && !found_fail; ++t) {
            testkit::GenConfig trace_cfg;
            trace_cfg.seed = cfg.seed * 100 + t;
            trace_cfg.horizon = 30;
            trace_cfg.presence_density = densities[t % 4];
            StreamTrace inputs = testkit::gen_trace(trace_cfg, mutant->inputs);
            UncheckedRun r = run_unchecked(*mutant, inputs);
            if (!r.fails.empty()) found_fail = true;
        }
        if (found_fail) ++refinement_with_fail;
    }

    double ratio = refinement_mutants == 0
                       ? 0.0
                       : static_cast<double>(refinement_with_fail) / refinement_mutants;
    bool pass = mutants == 200 && rejected == 200 && refinement_mutants > 0 && ratio >= 0.8;
    std::ostringstream detail;
    detail << mutants << " mutants, " << rejected << " rejected; " << refinement_with_fail
           << "/" << refinement_mutants << " refinement mutants fail on a random trace ("
           << static_cast<int>(ratio * 100) << "%)";
    report(7, "negative suite", pass, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    specs_dir = argc > 1 ? fs::path(argv[1]) : fs::path(STREAMCORE_SOURCE_DIR) / "specs";

    try {
        criterion_1();
        criterion_2();
        criterion_3();
        CorpusStats corpus = run_safety_corpus();
        criteria_4_and_5c(corpus);
        criterion_5(corpus);
        criterion_6();
        criterion_7();
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
        return 2;
    }

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
