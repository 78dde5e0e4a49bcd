#include "sarfil/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"
#include "sarfil/gmf.hpp"
#include "sarfil/grid.hpp"
#include "sarfil/synth.hpp"
#include "sarfil/timeutil.hpp"

namespace sarfil::cli {

namespace fs = std::filesystem;

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::pair<int, int> parse_month_day(const std::string& v, const std::string& key) {
    if (v.size() != 5 || v[2] != '-')
        throw ConfigError("config key '" + key + "': expected MM-DD, got '" + v + "'");
    const int m = static_cast<int>(parse_int(v.substr(0, 2), key));
    const int d = static_cast<int>(parse_int(v.substr(3, 2), key));
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw ConfigError("config key '" + key + "': bad month-day '" + v + "'");
    return {m, d};
}

std::vector<double> make_x_grid(double x_min, double x_max, double x_step) {
    if (x_step <= 0.0 || x_max <= x_min)
        throw ConfigError("sweep grid: require x_min < x_max and x_step > 0");
    std::vector<double> grid;
    const long lo = std::lround(x_min / x_step);
    const long hi = std::lround(x_max / x_step);
    for (long i = lo; i <= hi; ++i) {
        if (i == 0) continue;  // zero exponent is excluded
        const double x = static_cast<double>(i) * x_step;
        if (x < x_min - 1e-9 || x > x_max + 1e-9) continue;
        grid.push_back(x);
    }
    return grid;
}

// Bounded worker pool over scene-sized work items; results land in
// caller-indexed slots so aggregation order is deterministic.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const int k = std::clamp(workers, 1, 64);
    if (k == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct ConfigKV {
    std::string path;
    std::vector<std::pair<std::string, std::string>> entries;
};

ConfigKV read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ConfigKV kv;
    kv.path = path;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value");
        kv.entries.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1))});
    }
    return kv;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    double x_min = -5.0, x_max = 5.0, x_step = 0.1;
    const ConfigKV kv = read_kv(path);
    for (const auto& [key, value] : kv.entries) {
        try {
            if (key == "catalog") cfg.catalog_path = value;
            else if (key == "sightings") cfg.sightings_path = value;
            else if (key == "wind") cfg.wind_path = value;
            else if (key == "domains") cfg.domains_path = value;
            else if (key == "gmf_coeffs") cfg.gmf_coeff_path = value;
            else if (key == "pol_ratio") cfg.pol_ratio_path = value;
            else if (key == "out_dir") cfg.out_dir = value;
            else if (key == "threshold") cfg.agreement.threshold = parse_double(value, key);
            else if (key == "connectivity")
                cfg.agreement.connectivity = static_cast<int>(parse_int(value, key));
            else if (key == "min_span_m") cfg.agreement.min_span_m = parse_double(value, key);
            else if (key == "x_min") x_min = parse_double(value, key);
            else if (key == "x_max") x_max = parse_double(value, key);
            else if (key == "x_step") x_step = parse_double(value, key);
            else if (key == "x_star") cfg.sweep.x_star = parse_double(value, key);
            else if (key == "deltas") {
                cfg.sweep.deltas.clear();
                for (const auto& d : split_csv(value))
                    cfg.sweep.deltas.push_back(static_cast<int>(parse_int(d, key)));
            } else if (key == "wind_min") cfg.wind_min = parse_double(value, key);
            else if (key == "wind_max") cfg.wind_max = parse_double(value, key);
            else if (key == "min_coverage") cfg.min_coverage_frac = parse_double(value, key);
            else if (key == "season_start") {
                auto [m, d] = parse_month_day(value, key);
                cfg.season_start_month = m;
                cfg.season_start_day = d;
            } else if (key == "season_end") {
                auto [m, d] = parse_month_day(value, key);
                cfg.season_end_month = m;
                cfg.season_end_day = d;
            } else if (key == "incidence_near") cfg.incidence_near = parse_double(value, key);
            else if (key == "incidence_far") cfg.incidence_far = parse_double(value, key);
            else if (key == "pyramid_levels")
                cfg.pyramid_levels = static_cast<int>(parse_int(value, key));
            else if (key == "mask") cfg.apply_gmf_mask = parse_bool(value, key);
            else if (key == "mask_lo_wind") cfg.mask_lo_wind = parse_double(value, key);
            else if (key == "mask_hi_wind") cfg.mask_hi_wind = parse_double(value, key);
            else if (key == "lat_min") cfg.sighting_bounds.lat_min = parse_double(value, key);
            else if (key == "lat_max") cfg.sighting_bounds.lat_max = parse_double(value, key);
            else if (key == "lon_min") cfg.sighting_bounds.lon_min = parse_double(value, key);
            else if (key == "lon_max") cfg.sighting_bounds.lon_max = parse_double(value, key);
            else if (key == "workers") cfg.workers = static_cast<int>(parse_int(value, key));
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const DataError& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    cfg.sweep.x_grid = make_x_grid(x_min, x_max, x_step);
    validate_agreement_params(cfg.agreement);
    validate_sweep_config(cfg.sweep);
    if (cfg.pyramid_levels < 1) throw ConfigError("pyramid_levels must be >= 1");
    if (cfg.wind_min >= cfg.wind_max) throw ConfigError("require wind_min < wind_max");
    const int season_lo = cfg.season_start_month * 100 + cfg.season_start_day;
    const int season_hi = cfg.season_end_month * 100 + cfg.season_end_day;
    if (season_lo >= season_hi) throw ConfigError("season window start must precede end");
    for (const std::string& p :
         {cfg.catalog_path, cfg.sightings_path, cfg.wind_path, cfg.domains_path,
          cfg.gmf_coeff_path, cfg.pol_ratio_path}) {
        if (!p.empty() && !fs::exists(p))
            throw ConfigError("configured file does not exist: " + p);
    }
    return cfg;
}

namespace {

const SceneRecord& find_scene(const std::vector<SceneRecord>& catalog,
                              const std::string& scene_id) {
    for (const auto& s : catalog)
        if (s.scene_id == scene_id) return s;
    throw DataError("scene '" + scene_id + "' is not in the catalog");
}

std::vector<SceneRecord> load_catalog_checked(const RunConfig& cfg) {
    if (cfg.catalog_path.empty()) throw ConfigError("config key 'catalog' is required");
    return load_scene_catalog(cfg.catalog_path);
}

GmfSpec load_gmf_checked(const RunConfig& cfg) {
    if (cfg.gmf_coeff_path.empty() || cfg.pol_ratio_path.empty())
        throw ConfigError("config keys 'gmf_coeffs' and 'pol_ratio' are required");
    return load_gmf(cfg.gmf_coeff_path, cfg.pol_ratio_path);
}

void ensure_out_dir(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
    fs::create_directories(cfg.out_dir);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

Grid incidence_ramp(const Grid& like, double near_deg, double far_deg) {
    Grid inc(like.nrows, like.ncols, like.pixel_size_m, like.origin_lat,
             like.origin_lon);
    for (int j = 0; j < like.ncols; ++j) {
        const double t = like.ncols > 1 ? static_cast<double>(j) / (like.ncols - 1) : 0.0;
        const double v = near_deg + t * (far_deg - near_deg);
        for (int i = 0; i < like.nrows; ++i) inc.at(i, j) = v;
    }
    return inc;
}

struct ScenePipeline {
    std::vector<Grid> contrasts;  // one per bracket, at the fine resolution
    FilamentField field;
    std::size_t nonpositive_wind = 0;
};

// Shared per-scene path: pyramid, optional GMF bounds mask at the fine
// (800-m) level, per-bracket contrast, optional wind-power adjustment,
// agreement average, labeling, span filtering.
ScenePipeline run_scene_pipeline(const RunConfig& cfg, const GmfSpec& gmf,
                                 const SceneRecord& scene,
                                 const WindField* wind_field,
                                 std::optional<double> x_star) {
    const Grid base = read_sgrd(scene.grid_path);

    const double fine_res = cfg.agreement.brackets[0].first;
    double max_res = fine_res;
    for (const auto& [f, c] : cfg.agreement.brackets) {
        if (f != fine_res)
            throw ConfigError("all brackets must share one fine resolution");
        if (c <= f) throw ConfigError("bracket coarse resolution must exceed fine");
        max_res = std::max(max_res, c);
    }
    const int levels_needed =
        1 + static_cast<int>(std::lround(std::log2(max_res / base.pixel_size_m)));
    if (base.pixel_size_m > fine_res + 1e-9)
        throw DataError("scene '" + scene.scene_id + "' base resolution " +
                        fmt_double(base.pixel_size_m) + " m is coarser than " +
                        fmt_double(fine_res) + " m");
    const Pyramid pyramid = build_pyramid(base, levels_needed);

    const int fine_level = pyramid.level_at(fine_res);
    if (fine_level < 0)
        throw DataError("scene '" + scene.scene_id + "' has no " +
                        fmt_double(fine_res) + " m pyramid level");
    Grid fine = pyramid.levels[static_cast<std::size_t>(fine_level)];

    if (cfg.apply_gmf_mask) {
        SceneGeometry geom;
        geom.incidence = incidence_ramp(fine, cfg.incidence_near, cfg.incidence_far);
        geom.track_heading_deg = scene.track_heading_deg;
        geom.look_direction_deg = std::fmod(scene.track_heading_deg + 90.0, 360.0);
        const MaskBounds bounds =
            mask_bounds(gmf, geom, scene.pol, cfg.mask_lo_wind, cfg.mask_hi_wind);
        fine = apply_mask(fine, bounds.lo, bounds.hi);
    }

    ScenePipeline out;
    for (const auto& [f, c] : cfg.agreement.brackets) {
        (void)f;
        const int coarse_level = pyramid.level_at(c);
        if (coarse_level < 0)
            throw DataError("scene '" + scene.scene_id + "' has no " +
                            fmt_double(c) + " m pyramid level");
        out.contrasts.push_back(
            contrast(fine, pyramid.levels[static_cast<std::size_t>(coarse_level)]));
    }

    if (x_star) {
        if (!wind_field)
            throw ConfigError("adjustment requires a wind file in the config");
        const Grid v = interpolate_wind(*wind_field, out.contrasts[0], scene.t_utc);
        for (Grid& g : out.contrasts)
            g = adjust_contrast(g, v, *x_star, &out.nonpositive_wind);
    }

    const Grid avg = agreement_average(out.contrasts[0], out.contrasts[1],
                                       out.contrasts[2], cfg.agreement);
    const Labeling labeling = label_components(avg, cfg.agreement.connectivity);
    out.field = filter_span(avg, labeling, cfg.agreement.min_span_m);
    return out;
}

std::string adj_suffix(std::optional<double> x_star) {
    return x_star ? "_adj" + fmt_double(*x_star) : "";
}

int cmd_pyramid(const RunConfig& cfg, const std::string& scene_id) {
    const auto catalog = load_catalog_checked(cfg);
    const SceneRecord& scene = find_scene(catalog, scene_id);
    const Grid base = read_sgrd(scene.grid_path);
    const Pyramid pyramid = build_pyramid(base, cfg.pyramid_levels);
    ensure_out_dir(cfg);
    for (std::size_t k = 0; k < pyramid.levels.size(); ++k) {
        const Grid& level = pyramid.levels[k];
        const std::string stem = scene_id + "_level" + std::to_string(k) + "_" +
                                 fmt_double(level.pixel_size_m) + "m";
        write_sgrd(level, out_path(cfg, stem + ".sgrd"));
        write_pgm(level, out_path(cfg, stem + ".pgm"));
    }
    std::cout << "scene " << scene_id << ": wrote " << pyramid.levels.size()
              << " pyramid levels to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_contrast(const RunConfig& cfg, const std::string& scene_id) {
    const auto catalog = load_catalog_checked(cfg);
    const SceneRecord& scene = find_scene(catalog, scene_id);
    const Grid base = read_sgrd(scene.grid_path);
    const double fine_res = cfg.agreement.brackets[0].first;
    double max_res = fine_res;
    for (const auto& [f, c] : cfg.agreement.brackets) {
        (void)f;
        max_res = std::max(max_res, c);
    }
    const int levels_needed =
        1 + static_cast<int>(std::lround(std::log2(max_res / base.pixel_size_m)));
    const Pyramid pyramid = build_pyramid(base, levels_needed);
    const int fine_level = pyramid.level_at(fine_res);
    if (fine_level < 0)
        throw DataError("scene '" + scene_id + "' has no " + fmt_double(fine_res) +
                        " m pyramid level");
    ensure_out_dir(cfg);
    for (const auto& [f, c] : cfg.agreement.brackets) {
        (void)f;
        const int coarse_level = pyramid.level_at(c);
        if (coarse_level < 0)
            throw DataError("scene '" + scene_id + "' has no " + fmt_double(c) +
                            " m pyramid level");
        const Grid g = contrast(pyramid.levels[static_cast<std::size_t>(fine_level)],
                                pyramid.levels[static_cast<std::size_t>(coarse_level)]);
        const std::string stem = scene_id + "_contrast_" + fmt_double(fine_res) +
                                 "_" + fmt_double(c);
        write_sgrd(g, out_path(cfg, stem + ".sgrd"));
        write_pgm(g, out_path(cfg, stem + ".pgm"));
    }
    std::cout << "scene " << scene_id << ": wrote " << cfg.agreement.brackets.size()
              << " contrast brackets to " << cfg.out_dir << "\n";
    return 0;
}

WindField load_wind_field_checked(const RunConfig& cfg) {
    if (cfg.wind_path.empty()) throw ConfigError("config key 'wind' is required");
    return build_wind_field(load_wind_series(cfg.wind_path).rows);
}

int cmd_filaments(const RunConfig& cfg, const std::string& scene_id,
                  std::optional<double> x_star) {
    const auto catalog = load_catalog_checked(cfg);
    const SceneRecord& scene = find_scene(catalog, scene_id);
    const GmfSpec gmf = load_gmf_checked(cfg);
    WindField wind;
    if (x_star) wind = load_wind_field_checked(cfg);
    const ScenePipeline result =
        run_scene_pipeline(cfg, gmf, scene, x_star ? &wind : nullptr, x_star);
    ensure_out_dir(cfg);
    const std::string stem = scene_id + "_filaments" + adj_suffix(x_star);
    write_sgrd(result.field.magnitude, out_path(cfg, stem + ".sgrd"));
    write_sgrd(result.field.labels, out_path(cfg, stem + "_labels.sgrd"));
    write_pgm(result.field.magnitude, out_path(cfg, stem + ".pgm"));
    std::cout << "scene " << scene_id << ": " << result.field.component_spans.size()
              << " filaments";
    for (double span : result.field.component_spans)
        std::cout << " " << fmt_double(span) << "m";
    std::cout << "\n";
    if (result.nonpositive_wind > 0)
        std::cout << "warning: " << result.nonpositive_wind
                  << " pixels invalidated by nonpositive wind\n";
    return 0;
}

int cmd_adjust(const RunConfig& cfg, const std::string& scene_id, double x_star) {
    const auto catalog = load_catalog_checked(cfg);
    const SceneRecord& scene = find_scene(catalog, scene_id);
    const GmfSpec gmf = load_gmf_checked(cfg);
    WindField wind = load_wind_field_checked(cfg);
    const ScenePipeline result =
        run_scene_pipeline(cfg, gmf, scene, &wind, x_star);
    ensure_out_dir(cfg);
    for (std::size_t k = 0; k < result.contrasts.size(); ++k) {
        const double coarse = cfg.agreement.brackets[k].second;
        const std::string stem = scene_id + "_contrast_" +
                                 fmt_double(cfg.agreement.brackets[k].first) + "_" +
                                 fmt_double(coarse) + adj_suffix(x_star);
        write_sgrd(result.contrasts[k], out_path(cfg, stem + ".sgrd"));
        write_pgm(result.contrasts[k], out_path(cfg, stem + ".pgm"));
    }
    std::cout << "scene " << scene_id << ": wrote adjusted contrasts (x* = "
              << fmt_double(x_star) << ") to " << cfg.out_dir << "\n";
    if (result.nonpositive_wind > 0)
        std::cout << "warning: " << result.nonpositive_wind
                  << " pixels invalidated by nonpositive wind\n";
    return 0;
}

int cmd_collocate(const RunConfig& cfg) {
    if (cfg.sightings_path.empty())
        throw ConfigError("config key 'sightings' is required");
    const auto catalog = load_catalog_checked(cfg);
    const SightingLoad loaded = load_sightings(cfg.sightings_path, cfg.sighting_bounds);
    for (const auto& r : loaded.rejects)
        std::cout << "reject\t" << cfg.sightings_path << "\t" << r << "\n";

    // Sources split in first-seen order: first source is the kept side.
    std::vector<std::string> sources;
    for (const auto& s : loaded.rows)
        if (std::find(sources.begin(), sources.end(), s.source) == sources.end())
            sources.push_back(s.source);
    if (sources.size() > 2)
        throw DataError("expected at most two sighting sources, found " +
                        std::to_string(sources.size()));
    std::vector<Sighting> a, b;
    for (const auto& s : loaded.rows)
        (s.source == sources.front() ? a : b).push_back(s);

    const DedupResult dedup = dedup_sightings(std::move(a), std::move(b));
    const auto matches = collocate_day(dedup.merged, catalog);
    const auto summary = summarize_counts(matches, catalog, dedup.merged);

    ensure_out_dir(cfg);
    write_summary_csv(summary, out_path(cfg, "collocation_summary.csv"));
    std::ofstream merged(out_path(cfg, "merged_sightings.csv"), std::ios::trunc);
    if (!merged) throw DataError("cannot open merged_sightings.csv for writing");
    merged << "source,iso_utc,lat,lon,count\n";
    for (const auto& s : dedup.merged)
        merged << s.source << "," << format_iso_utc(s.t_utc) << ","
               << fmt_double(s.lat) << "," << fmt_double(s.lon) << "," << s.count
               << "\n";

    std::cout << "sightings: " << loaded.rows.size() << " loaded, "
              << loaded.rejects.size() << " rejected, " << dedup.dead_dropped
              << " dead dropped, " << dedup.removed << " duplicates removed, "
              << dedup.merged.size() << " merged\n";
    std::cout << "collocations: " << matches.size() << " sighting-scene pairs\n";
    return 0;
}

int cmd_bin(const RunConfig& cfg, std::optional<double> x_star) {
    const auto catalog = load_catalog_checked(cfg);
    const GmfSpec gmf = load_gmf_checked(cfg);
    if (cfg.domains_path.empty()) throw ConfigError("config key 'domains' is required");
    const auto domains = load_domains(cfg.domains_path);
    if (cfg.wind_path.empty()) throw ConfigError("config key 'wind' is required");
    const WindSeriesLoad wind = load_wind_series(cfg.wind_path);
    if (wind.duplicate_overwrites > 0)
        std::cout << "warning: " << wind.duplicate_overwrites
                  << " duplicate wind rows (last wins)\n";
    const WindField wind_field = build_wind_field(wind.rows);

    std::vector<const SceneRecord*> scenes;
    for (const auto& s : catalog)
        if (in_season(s.t_utc, cfg.season_start_month, cfg.season_start_day,
                      cfg.season_end_month, cfg.season_end_day))
            scenes.push_back(&s);

    std::vector<std::vector<SceneSample>> per_scene(scenes.size());
    std::vector<std::size_t> skipped_domains(scenes.size(), 0);
    parallel_for(scenes.size(), cfg.workers, [&](std::size_t i) {
        const ScenePipeline result = run_scene_pipeline(
            cfg, gmf, *scenes[i], x_star ? &wind_field : nullptr, x_star);
        for (const auto& domain : domains) {
            const auto dc =
                domain_contrast(result.field, domain, cfg.min_coverage_frac);
            if (!dc) {
                ++skipped_domains[i];
                continue;
            }
            per_scene[i].push_back({domain.name, scenes[i]->t_utc, dc->c});
        }
    });

    std::vector<SceneSample> samples;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < per_scene.size(); ++i) {
        samples.insert(samples.end(), per_scene[i].begin(), per_scene[i].end());
        skipped += skipped_domains[i];
    }

    std::vector<std::pair<std::string, std::pair<double, double>>> boxes;
    for (const auto& d : domains)
        boxes.push_back({d.name, {d.era5_lat, d.era5_lon}});
    const auto wind_by_domain = domain_wind_series(wind.rows, boxes);
    const BinResult binned = bin_hourly(samples, wind_by_domain, cfg.sweep.deltas,
                                        cfg.wind_min, cfg.wind_max);

    ensure_out_dir(cfg);
    const std::string name = x_star ? "series" + adj_suffix(x_star) + ".csv"
                                    : "series.csv";
    write_series_csv(binned.samples, out_path(cfg, name));
    std::cout << "scenes in season: " << scenes.size() << "; domain samples: "
              << samples.size() << " (" << skipped
              << " domain overlaps below coverage)\n";
    std::cout << "binned samples: " << binned.samples.size() << " ("
              << binned.dropped_wind_range << " outside wind range, "
              << binned.dropped_missing_wind << " missing wind)\n";
    return 0;
}

int cmd_analyze(const RunConfig& cfg) {
    const std::string series_path = out_path(cfg, "series.csv");
    if (!fs::exists(series_path))
        throw DataError("binned series not found: " + series_path +
                        " (run the bin command first)");
    const auto samples = read_series_csv(series_path);

    std::vector<std::string> domains;
    for (const auto& s : samples)
        if (std::find(domains.begin(), domains.end(), s.domain) == domains.end())
            domains.push_back(s.domain);
    std::sort(domains.begin(), domains.end());

    ensure_out_dir(cfg);
    std::ofstream table(out_path(cfg, "correlations.csv"), std::ios::trunc);
    if (!table) throw DataError("cannot open correlations.csv for writing");
    table << "domain,n,pearson,dcor,pearson_adjusted,dcor_adjusted\n";

    std::size_t analyzed = 0;
    for (const auto& domain : domains) {
        const PairedSeries series = to_paired_series(samples, domain, cfg.sweep.deltas);
        if (series.size() < 8) {
            std::cout << "SKIP\t" << domain << "\tn=" << series.size() << "\n";
            continue;
        }
        const DependenceReport report = sweep_exponent(series, cfg.sweep);
        write_report_csv(report, cfg.sweep.deltas,
                         out_path(cfg, "report_" + domain + ".csv"));

        const std::vector<double> adjusted =
            adjust_series(series.c, series.u0, cfg.sweep.x_star);
        table << domain << "," << series.size() << ","
              << fmt_double(pearson(series.c, series.u0)) << ","
              << fmt_double(dcor(series.c, series.u0)) << ","
              << fmt_double(pearson(adjusted, series.u0)) << ","
              << fmt_double(dcor(adjusted, series.u0)) << "\n";

        std::cout << "domain " << domain << ": n=" << series.size()
                  << " max|pearson|=" << fmt_double(report.max_abs_pearson.value)
                  << " at x=" << fmt_double(report.max_abs_pearson.x)
                  << (report.low_confidence ? " (low confidence)" : "") << "\n";
        ++analyzed;
    }
    if (analyzed == 0) throw DataError("no domain has enough samples to analyze");
    return 0;
}

int cmd_synth(const std::string& genspec_path, std::optional<std::int64_t> seed,
              const std::string& out_dir) {
    if (genspec_path.empty())
        throw ConfigError("synth requires --config pointing to a genspec file");
    GenSpec spec = load_genspec(genspec_path);
    if (seed) spec.seed = static_cast<std::uint64_t>(*seed);
    if (out_dir.empty()) throw ConfigError("synth requires --out");
    fs::create_directories(out_dir);
    auto path_of = [&out_dir](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };

    const std::string scene_id = "synth" + std::to_string(spec.seed);
    // Fixed overpass time keeps the emitted fixture deterministic.
    const std::int64_t t_scene = parse_iso_utc("2019-07-26T21:00:00Z");

    const PairedSeries series = gen_model_series(spec, std::vector<int>{1, 2, 5});
    std::vector<DomainSample> samples;
    for (std::size_t i = 0; i < series.size(); ++i) {
        DomainSample s;
        s.domain = "synthetic";
        s.t_hour = hour_of(t_scene) + series.t_hour[i];
        s.c = series.c[i];
        s.u0 = series.u0[i];
        for (const auto& [delta, lag] : series.lags)
            s.lags[delta] = {lag.m2[i], lag.m1[i], lag.p1[i], lag.p2[i]};
        samples.push_back(std::move(s));
    }
    write_series_csv(samples, path_of("series.csv"));

    if (!spec.gmf_coeff_path.empty()) {
        const GmfSpec gmf = load_gmf(spec.gmf_coeff_path, spec.pol_ratio_path);
        const SceneTruth scene = gen_scene(spec, gmf);
        write_sgrd(scene.sigma0, path_of("scene_" + scene_id + ".sgrd"));
        write_sgrd(scene.truth.magnitude, path_of("truth_magnitude.sgrd"));
        write_sgrd(scene.truth.labels, path_of("truth_labels.sgrd"));
        write_sgrd(scene.wind, path_of("wind.sgrd"));
        write_pgm(scene.sigma0, path_of("scene_" + scene_id + ".pgm"));

        const Grid& g = scene.sigma0;
        const double lat_n = g.origin_lat + 0.01;
        const double lat_s = g.lat_of_row(g.nrows - 1) - 0.01;
        const double lon_w = g.origin_lon - 0.01;
        const double lon_e = g.lon_of_col(g.ncols - 1) + 0.01;

        std::ofstream catalog(path_of("catalog.csv"), std::ios::trunc);
        catalog << "scene_id,iso_utc,pol,grid_path,track_heading,ring\n";
        catalog << scene_id << "," << format_iso_utc(t_scene) << ",VV,"
                << path_of("scene_" + scene_id + ".sgrd") << ",0,"
                << fmt_double(lat_n) << " " << fmt_double(lon_w) << ";"
                << fmt_double(lat_n) << " " << fmt_double(lon_e) << ";"
                << fmt_double(lat_s) << " " << fmt_double(lon_e) << ";"
                << fmt_double(lat_s) << " " << fmt_double(lon_w) << "\n";

        std::ofstream windcsv(path_of("wind.csv"), std::ios::trunc);
        windcsv << "iso_utc,lat,lon,u10,v10\n";
        for (std::int64_t h = -12; h <= 12; ++h) {
            for (double lat : {lat_n + 0.05, lat_s - 0.05}) {
                for (double lon : {lon_w - 0.05, lon_e + 0.05}) {
                    windcsv << format_iso_utc(t_scene + h * 3600) << ","
                            << fmt_double(lat) << "," << fmt_double(lon) << ","
                            << fmt_double(spec.scene_wind) << ",0\n";
                }
            }
        }

        const double shrink_lat = (lat_n - lat_s) * 0.05;
        const double shrink_lon = (lon_e - lon_w) * 0.05;
        std::ofstream domains(path_of("domains.csv"), std::ios::trunc);
        domains << "name,vertex_index,lat,lon\n";
        domains << "synthetic,0," << fmt_double(lat_n - shrink_lat) << ","
                << fmt_double(lon_w + shrink_lon) << "\n";
        domains << "synthetic,1," << fmt_double(lat_n - shrink_lat) << ","
                << fmt_double(lon_e - shrink_lon) << "\n";
        domains << "synthetic,2," << fmt_double(lat_s + shrink_lat) << ","
                << fmt_double(lon_e - shrink_lon) << "\n";
        domains << "synthetic,3," << fmt_double(lat_s + shrink_lat) << ","
                << fmt_double(lon_w + shrink_lon) << "\n";
        domains << "synthetic," << fmt_double((lat_n + lat_s) / 2.0) << ","
                << fmt_double((lon_w + lon_e) / 2.0) << "\n";

        std::cout << "synth scene " << scene_id << ": "
                  << scene.truth.component_spans.size()
                  << " truth filaments; outputs in " << out_dir << "\n";
    } else {
        std::cout << "synth series: " << series.size() << " samples in " << out_dir
                  << "\n";
    }
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"SAR filament contrast and wind dependence pipeline"};
    app.require_subcommand(1);

    std::string config_path, scene_id, out_dir;
    double x_star = 0.0;
    std::int64_t seed = 0;

    auto add_config = [&config_path](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
    };
    auto add_scene = [&scene_id](CLI::App* cmd) {
        cmd->add_option("--scene", scene_id, "scene id from the catalog")->required();
    };

    CLI::App* pyramid = app.add_subcommand("pyramid", "write the smoothing pyramid of a scene");
    add_config(pyramid);
    add_scene(pyramid);

    CLI::App* contrast = app.add_subcommand("contrast", "write per-bracket contrast grids");
    add_config(contrast);
    add_scene(contrast);

    CLI::App* filaments = app.add_subcommand("filaments", "extract coherent filaments");
    add_config(filaments);
    add_scene(filaments);
    CLI::Option* fil_x = filaments->add_option("--xstar", x_star,
                                               "apply the wind-power adjustment");

    CLI::App* adjust = app.add_subcommand("adjust", "write wind-adjusted contrast grids");
    add_config(adjust);
    add_scene(adjust);
    adjust->add_option("--xstar", x_star, "adjustment exponent")->required();

    CLI::App* collocate = app.add_subcommand("collocate", "match sightings with scenes");
    add_config(collocate);

    CLI::App* bin = app.add_subcommand("bin", "bin domain contrast with hourly wind");
    add_config(bin);
    CLI::Option* bin_x = bin->add_option("--xstar", x_star,
                                         "adjust contrast before averaging");

    CLI::App* analyze = app.add_subcommand("analyze", "exponent sweep and reports");
    add_config(analyze);

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic fixtures");
    synth->add_option("--config", config_path, "genspec file")->required();
    CLI::Option* synth_seed = synth->add_option("--seed", seed, "seed override");
    synth->add_option("--out", out_dir, "output directory")->required();

    CLI::App* out_opt_cmds[] = {pyramid, contrast, filaments, adjust, collocate,
                                bin, analyze};
    for (CLI::App* cmd : out_opt_cmds)
        cmd->add_option("--out", out_dir, "output directory (overrides config)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR\t" << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(synth))
            return cmd_synth(config_path,
                             synth_seed->count() ? std::optional<std::int64_t>(seed)
                                                 : std::nullopt,
                             out_dir);

        RunConfig cfg = load_run_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        if (app.got_subcommand(pyramid)) return cmd_pyramid(cfg, scene_id);
        if (app.got_subcommand(contrast)) return cmd_contrast(cfg, scene_id);
        if (app.got_subcommand(filaments))
            return cmd_filaments(cfg, scene_id,
                                 fil_x->count() ? std::optional<double>(x_star)
                                                : std::nullopt);
        if (app.got_subcommand(adjust)) return cmd_adjust(cfg, scene_id, x_star);
        if (app.got_subcommand(collocate)) return cmd_collocate(cfg);
        if (app.got_subcommand(bin))
            return cmd_bin(cfg, bin_x->count() ? std::optional<double>(x_star)
                                               : std::nullopt);
        if (app.got_subcommand(analyze)) return cmd_analyze(cfg);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "ERROR\t" << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "ERROR\t" << e.what() << "\n";
        return 2;
    }
}

} // namespace sarfil::cli
