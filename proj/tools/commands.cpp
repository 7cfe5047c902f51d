#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rwre/diagnostics.hpp"
#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rates.hpp"
#include "rwre/sweep.hpp"
#include "rwre/transfer.hpp"

namespace rwre::cli
{
namespace
{

using nlohmann::json;
namespace fs = std::filesystem;

class CsvWriter
{
  public:
    explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t k = 0; k < fields.size(); ++k)
        {
            if (k)
                out_ << ',';
            out_ << csv_field(fields[k]);
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

  private:
    std::ostringstream out_;
};

std::string num(double v) { return format_double(v); }
std::string num(int v) { return std::to_string(v); }

// JSON numbers that cannot be represented (inf, nan) become null.
json jnum(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

struct OutputSet
{
    fs::path dir;
    std::vector<std::pair<std::string, std::string>> files;  // name, bytes

    void add(const std::string& name, std::string bytes)
    {
        files.emplace_back(name, std::move(bytes));
    }
};

void write_file(const fs::path& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ResourceError("cannot write '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json disorder_json(const DisorderStats& st)
{
    return {{"c", st.c},
            {"lambda", st.lambda},
            {"kappa", st.kappa},
            {"sigma2", st.sigma2},
            {"second_moment_const", st.second_moment_const},
            {"psi_nondegenerate", st.psi_nondegenerate},
            {"q", st.q}};
}

json gap_json(const GapEstimate& g)
{
    return {{"n", g.n},
            {"epsilon", g.epsilon},
            {"mean_gap", g.mean_gap},
            {"stderr", g.std_error},
            {"replicas", g.replicas}};
}

json criterion_json(const CriterionReport& c)
{
    return {{"inf_ia", c.inf_ia},
            {"inf_iq_est", c.inf_iq_est},
            {"inf_iq_stderr", c.inf_iq_std_error},
            {"z_score", jnum(c.z_score)},
            {"verdict", to_string(c.verdict)}};
}

WalkOptions walk_options(const RunConfig& cfg) { return {cfg.memory_budget}; }

//---------------------------------------------------------------------------//
void cmd_localize(const RunConfig& cfg, OutputSet& out)
{
    const auto model = build_model(cfg);
    const int d = cfg.dim;
    std::vector<LocalizationSeries> series(static_cast<std::size_t>(cfg.replicas));
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < cfg.replicas; ++r)
        slot.run([&] {
            series[r] = run_walk(replica_model(model, cfg.seed, r), cfg.n, walk_options(cfg));
        });
    slot.rethrow();

    std::vector<std::string> header = {"replica", "n", "log_w", "j", "i",
                                       "cesaro_j", "cesaro_i"};
    for (int k = 0; k < d; ++k)
        header.push_back("argmax_x" + std::to_string(k + 1));
    CsvWriter csv(header);
    std::vector<double> log_w;
    double cj = 0, ci = 0;
    for (int r = 0; r < cfg.replicas; ++r)
    {
        for (const auto& rec : series[r].records)
        {
            std::vector<std::string> row = {num(r),         num(rec.n),
                                            num(rec.log_w), num(rec.j),
                                            num(rec.i),     num(rec.cesaro_j),
                                            num(rec.cesaro_i)};
            for (int x : rec.argmax_site)
                row.push_back(num(x));
            csv.row(row);
        }
        const auto& last = series[r].records.back();
        log_w.push_back(last.log_w);
        cj += last.cesaro_j;
        ci += last.cesaro_i;
    }

    const auto gap = gap_from_log_w(log_w, cfg.n, model.is_perturbed() ? cfg.epsilon : 0.0);
    const auto crit = criterion_from_gap(gap, model.stats().lambda);
    const auto frac = fractional_from_log_w(log_w, cfg.n, cfg.theta);

    json summary = {{"schema_version", kSchemaVersion},
                    {"command", "localize"},
                    {"gap", gap_json(gap)},
                    {"criterion", criterion_json(crit)},
                    {"fractional_moment",
                     {{"theta", frac.theta},
                      {"value", jnum(frac.value)},
                      {"stderr", jnum(frac.std_error)}}},
                    {"cesaro_final",
                     {{"mean_cesaro_j", cj / cfg.replicas},
                      {"mean_cesaro_i", ci / cfg.replicas}}},
                    {"disorder", disorder_json(model.stats())}};

    if (cfg.resamples > 0)
    {
        DoobOptions opt;
        opt.resamples = cfg.resamples;
        opt.walk = walk_options(cfg);
        const auto replica0 = replica_model(model, cfg.seed, 0);
        const auto doob = doob_decompose(series[0], replica0, opt);
        json steps = json::array();
        for (const auto& st : doob.steps)
        {
            steps.push_back({{"n", st.n},
                             {"m", st.m},
                             {"a", st.a},
                             {"i_n", st.i_n},
                             {"cond_u2", st.cond_u2},
                             {"cond_u2_stderr", st.cond_u2_se},
                             {"cond_neglog", st.cond_neglog},
                             {"ratio", jnum(st.ratio)},
                             {"ratio_in_bounds", st.ratio_in_bounds}});
        }
        summary["doob"] = {{"replica", 0},
                           {"resamples", cfg.resamples},
                           {"sigma2", doob.sigma2},
                           {"ratio_bound", doob.ratio_bound},
                           {"overlap_ratio_min", jnum(doob.overlap_ratio_min)},
                           {"overlap_ratio_max", jnum(doob.overlap_ratio_max)},
                           {"steps", steps}};
    }
    out.add("series.csv", csv.str());
    out.add("summary.json", dump(summary));
}

void cmd_sweep(const RunConfig& cfg, OutputSet& out)
{
    const auto family = build_model(cfg);
    SweepOptions opt;
    opt.common_noise = cfg.common_noise;
    opt.kappa_target = cfg.kappa;
    opt.walk = walk_options(cfg);
    const auto table =
        epsilon_sweep(family, cfg.epsilon_grid, cfg.n, cfg.replicas, cfg.seed, opt);

    CsvWriter csv({"epsilon", "n", "replicas", "mean_gap", "stderr", "localized_flag"});
    for (const auto& row : table.rows)
    {
        csv.row({num(row.epsilon), num(row.gap.n), num(row.gap.replicas),
                 num(row.gap.mean_gap), num(row.gap.std_error),
                 row.localized ? "1" : "0"});
    }
    json violations = json::array();
    for (const auto& [a, b] : table.monotonicity_violations)
        violations.push_back({{"from", table.rows[a].epsilon}, {"to", table.rows[b].epsilon}});
    json eps_bar = {{"detected", table.eps_bar_detected},
                    {"resolution", table.resolution}};
    if (table.eps_bar_detected)
    {
        eps_bar["lower"] = table.eps_bar_lower;
        eps_bar["upper"] = table.eps_bar_upper;
    }
    json j = {{"schema_version", kSchemaVersion},
              {"command", "sweep"},
              {"common_noise", cfg.common_noise},
              {"eps_bar", eps_bar},
              {"monotonicity",
               {{"monotone", violations.empty()}, {"violations", violations}}},
              {"eps_max", table.eps_max}};
    if (cfg.kappa)
        j["kappa"] = *cfg.kappa;
    out.add("sweep.csv", csv.str());
    out.add("sweep.json", dump(j));
}

void cmd_second_moment(const RunConfig& cfg, OutputSet& out)
{
    const auto model = build_model(cfg);
    auto curve = second_moment_exact(model, cfg.n, cfg.memory_budget);
    std::string tag = "unclassified";
    if (curve.log_ew2.size() >= 20)
        tag = to_string(classify_growth(curve));

    CsvWriter csv({"n", "ew2", "log_increment", "classification"});
    double prev = 0;
    for (std::size_t k = 0; k < curve.n.size(); ++k)
    {
        csv.row({num(curve.n[k]), num(curve.ew2[k]), num(curve.log_ew2[k] - prev), tag});
        prev = curve.log_ew2[k];
    }
    out.add("l2.csv", csv.str());
}

void cmd_rates(const RunConfig& cfg, OutputSet& out)
{
    const auto model = build_model(cfg);
    const int d = cfg.dim;
    auto ys = cfg.y_grid.empty() ? boundary_grid(d, cfg.grid_points) : cfg.y_grid;
    RateOptions opt;
    opt.extrapolate = cfg.extrapolate;
    opt.walk = walk_options(cfg);
    const auto reports =
        quenched_rate_profile(ys, model, cfg.n, cfg.replicas, cfg.seed, opt);

    std::vector<std::string> header;
    for (int k = 0; k < d; ++k)
        header.push_back("y" + std::to_string(k + 1));
    for (const char* h : {"ia", "ia_n", "stirling_correction", "iq_mean", "iq_stderr"})
        header.push_back(h);
    if (cfg.extrapolate)
        header.push_back("iq_extrapolated");
    CsvWriter csv(header);

    double inf_ia = std::numeric_limits<double>::infinity();
    double inf_iq = std::numeric_limits<double>::infinity();
    for (const auto& r : reports)
    {
        std::vector<std::string> row;
        for (double v : r.y)
            row.push_back(num(v));
        for (double v : {r.ia, r.ia_n, r.stirling_correction, r.iq_mean, r.iq_std_error})
            row.push_back(num(v));
        if (cfg.extrapolate)
            row.push_back(num(r.iq_extrapolated));
        csv.row(row);
        inf_ia = std::min(inf_ia, r.ia);
        inf_iq = std::min(inf_iq, r.iq_mean);
    }

    const auto crit = criterion_report(model, cfg.n, cfg.replicas, cfg.seed, opt.walk);
    json j = {{"schema_version", kSchemaVersion},
              {"command", "rates"},
              {"n", cfg.n},
              {"replicas", cfg.replicas},
              {"minus_lambda", -model.stats().lambda},
              {"annealed_minimizer", annealed_minimizer(model.stats())},
              {"grid_inf_ia", inf_ia},
              {"grid_inf_iq_mean", inf_iq},
              {"bias_note", reports.front().bias_note},
              {"criterion", criterion_json(crit)},
              {"gap", gap_json(crit.gap)}};
    out.add("rates.csv", csv.str());
    out.add("rates.json", dump(j));
}

void cmd_example_d4(const RunConfig& cfg, OutputSet& out)
{
    const auto rep =
        example_d4_verify(cfg.y, cfg.epsilon, cfg.n, cfg.seeds, cfg.seed, cfg.memory_budget);
    json j = {{"schema_version", kSchemaVersion},
              {"command", "example-d4"},
              {"y", rep.y},
              {"epsilon", rep.epsilon},
              {"n", rep.n},
              {"f_y", rep.f_y},
              {"ia_y", rep.ia_y},
              {"lambda", rep.lambda},
              {"a_star", rep.a_star},
              {"mean_log_term", rep.mean_log_term},
              {"bound_margin", rep.bound_margin},
              {"hoeffding_level", rep.hoeffding_level},
              {"lpp",
               {{"seeds", static_cast<int>(rep.lpp.size())},
                {"mean", rep.lpp_mean},
                {"max", rep.lpp_max},
                {"fraction_within_hoeffding", rep.lpp_fraction_within},
                {"bounded_by_log1p_eps", rep.lpp_bounded_by_log1p},
                {"values", rep.lpp}}},
              {"verdict", rep.verdict}};
    out.add("example_d4.json", dump(j));
}

}  // namespace

//---------------------------------------------------------------------------//
std::string fnv1a64_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v)
{
    if (v == 0)
        return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
    {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    q += '"';
    return q;
}

std::vector<std::string> run_command(const RunConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    OutputSet out;
    out.dir = cfg.out;

    if (cfg.command == "localize")
        cmd_localize(cfg, out);
    else if (cfg.command == "sweep")
        cmd_sweep(cfg, out);
    else if (cfg.command == "second-moment")
        cmd_second_moment(cfg, out);
    else if (cfg.command == "rates")
        cmd_rates(cfg, out);
    else if (cfg.command == "example-d4")
        cmd_example_d4(cfg, out);
    else
        throw DomainError("config field 'command': unknown command '" + cfg.command + "'");

    std::error_code ec;
    fs::create_directories(out.dir, ec);
    if (ec)
        throw ResourceError("cannot create output directory '" + cfg.out
                            + "': " + ec.message());

    json files = json::array();
    std::vector<std::string> names;
    for (const auto& [name, bytes] : out.files)
    {
        write_file(out.dir / name, bytes);
        files.push_back({{"name", name},
                         {"bytes", bytes.size()},
                         {"fnv1a64", fnv1a64_hex(bytes)}});
        names.push_back(name);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Only the runtime block varies between replays of the same config.
    json manifest = {{"schema_version", kSchemaVersion},
                     {"artifact_version", kArtifactVersion},
                     {"config", config_to_json(cfg)},
                     {"files", files},
                     {"runtime", {{"wall_time_s", wall}, {"threads", omp_get_max_threads()}}}};
    write_file(out.dir / "manifest.json", dump(manifest));
    names.push_back("manifest.json");
    return names;
}

int run_main(int argc, const char* const* argv, std::ostream& err)
{
    try
    {
        auto cfg = parse_command_line(argc, argv);
        if (!cfg)
            return kExitOk;
        if (cfg->threads > 0)
            omp_set_num_threads(cfg->threads);
        run_command(*cfg);
        return kExitOk;
    }
    catch (const DomainError& e)
    {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const ResourceError& e)
    {
        err << "resource error: " << e.what() << '\n';
        return kExitResource;
    }
    catch (const std::bad_alloc&)
    {
        err << "resource error: out of memory\n";
        return kExitResource;
    }
    catch (const InvariantError& e)
    {
        err << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    }
    catch (const std::exception& e)
    {
        err << "internal error: " << e.what() << '\n';
        return kExitInvariant;
    }
}

}  // namespace rwre::cli
