#include "sarfil/collocate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"
#include "sarfil/filament.hpp"

namespace sarfil {

namespace {

bool parse_flag(const std::string& s) {
    if (s.empty() || s == "0" || s == "false" || s == "no") return false;
    if (s == "1" || s == "true" || s == "yes") return true;
    throw DataError("not a boolean flag: '" + s + "'");
}

struct TimeOrder {
    bool operator()(const Sighting& a, const Sighting& b) const {
        if (a.t_utc != b.t_utc) return a.t_utc < b.t_utc;
        if (a.source != b.source) return a.source < b.source;
        if (a.lat != b.lat) return a.lat < b.lat;
        if (a.lon != b.lon) return a.lon < b.lon;
        return a.count < b.count;
    }
};

} // namespace

SightingLoad load_sightings(const std::string& path, const GeoBounds& bounds) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sightings file: " + path);
    SightingLoad out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv(t);
        if (!fields.empty() && fields[0] == "source") continue;
        try {
            if (fields.size() != 5 && fields.size() != 6)
                throw DataError("expected source,iso_utc,lat,lon,count[,dead_flag]");
            Sighting s;
            s.source = fields[0];
            if (s.source.empty()) throw DataError("empty source");
            s.t_utc = parse_iso_utc(fields[1]);
            s.lat = parse_double(fields[2], "lat");
            s.lon = parse_double(fields[3], "lon");
            s.count = static_cast<int>(parse_int(fields[4], "count"));
            if (s.count < 1) throw DataError("count must be >= 1");
            if (s.lat < bounds.lat_min || s.lat > bounds.lat_max ||
                s.lon < bounds.lon_min || s.lon > bounds.lon_max)
                throw DataError("position outside configured bounds");
            if (fields.size() == 6 && !fields[5].empty())
                s.dead = parse_flag(fields[5]);
            out.rows.push_back(std::move(s));
        } catch (const DataError& e) {
            out.rejects.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

DedupResult dedup_sightings(std::vector<Sighting> a, std::vector<Sighting> b,
                            const DedupParams& params) {
    DedupResult out;
    auto drop_dead = [&out](std::vector<Sighting>& v) {
        const auto it = std::remove_if(v.begin(), v.end(),
                                       [](const Sighting& s) { return s.dead; });
        out.dead_dropped += static_cast<std::size_t>(v.end() - it);
        v.erase(it, v.end());
    };
    drop_dead(a);
    drop_dead(b);
    std::sort(a.begin(), a.end(), TimeOrder{});
    std::sort(b.begin(), b.end(), TimeOrder{});

    // Candidate pairs within the dedup window, best (nearest-in-time) first.
    struct Candidate {
        std::int64_t dt;
        std::size_t ia, ib;
    };
    std::vector<Candidate> candidates;
    std::size_t lo = 0;
    for (std::size_t ia = 0; ia < a.size(); ++ia) {
        while (lo < b.size() && b[lo].t_utc < a[ia].t_utc - params.max_dt_s) ++lo;
        for (std::size_t ib = lo; ib < b.size(); ++ib) {
            if (b[ib].t_utc > a[ia].t_utc + params.max_dt_s) break;
            if (b[ib].count != a[ia].count) continue;
            if (std::abs(b[ib].lat - a[ia].lat) > params.max_dlat) continue;
            if (std::abs(b[ib].lon - a[ia].lon) > params.max_dlon) continue;
            candidates.push_back({std::llabs(b[ib].t_utc - a[ia].t_utc), ia, ib});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) {
                  if (x.dt != y.dt) return x.dt < y.dt;
                  if (x.ia != y.ia) return x.ia < y.ia;
                  return x.ib < y.ib;
              });

    std::vector<bool> a_used(a.size(), false), b_dropped(b.size(), false);
    for (const auto& c : candidates) {
        if (a_used[c.ia] || b_dropped[c.ib]) continue;
        a_used[c.ia] = true;
        b_dropped[c.ib] = true;
        ++out.removed;
    }

    out.merged = std::move(a);
    for (std::size_t ib = 0; ib < b.size(); ++ib)
        if (!b_dropped[ib]) out.merged.push_back(b[ib]);
    std::sort(out.merged.begin(), out.merged.end(), TimeOrder{});
    return out;
}

std::vector<SceneRecord> load_scene_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scene catalog: " + path);
    std::vector<SceneRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv(t);
        if (!fields.empty() && fields[0] == "scene_id") continue;
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 6)
            throw DataError(where + ": expected scene_id,iso_utc,pol,grid_path,track_heading,ring");
        SceneRecord r;
        r.scene_id = fields[0];
        if (r.scene_id.empty()) throw DataError(where + ": empty scene_id");
        try {
            r.t_utc = parse_iso_utc(fields[1]);
            r.pol = parse_polarization(fields[2]);
            r.grid_path = fields[3];
            r.track_heading_deg = parse_double(fields[4], "track_heading");
            std::stringstream ring(fields[5]);
            std::string pair;
            while (std::getline(ring, pair, ';')) {
                std::stringstream p(trim(pair));
                double lat, lon;
                if (!(p >> lat >> lon))
                    throw DataError("bad ring vertex '" + pair + "'");
                r.ring.push_back({lat, lon});
            }
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        if (r.ring.size() < 3) throw DataError(where + ": ring needs >= 3 vertices");
        if (r.grid_path.empty()) throw DataError(where + ": empty grid_path");
        out.push_back(std::move(r));
    }
    return out;
}

WindSeriesLoad load_wind_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open wind file: " + path);
    WindSeriesLoad out;
    std::map<std::tuple<std::int64_t, double, double>, std::size_t> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv(t);
        if (!fields.empty() && fields[0] == "iso_utc") continue;
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 5)
            throw DataError(where + ": expected iso_utc,lat,lon,u10,v10");
        WindRecord r;
        try {
            r.t_utc = parse_iso_utc(fields[0]);
            r.lat = parse_double(fields[1], "lat");
            r.lon = parse_double(fields[2], "lon");
            r.u10 = parse_double(fields[3], "u10");
            r.v10 = parse_double(fields[4], "v10");
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        const auto key = std::make_tuple(r.t_utc, r.lat, r.lon);
        auto it = seen.find(key);
        if (it != seen.end()) {
            out.rows[it->second] = r;  // last wins
            ++out.duplicate_overwrites;
        } else {
            seen[key] = out.rows.size();
            out.rows.push_back(r);
        }
    }
    return out;
}

std::vector<Collocation> collocate_day(const std::vector<Sighting>& sightings,
                                       const std::vector<SceneRecord>& scenes) {
    std::vector<Collocation> out;
    for (std::size_t is = 0; is < scenes.size(); ++is) {
        const std::int64_t scene_day = day_of(scenes[is].t_utc);
        for (std::size_t iw = 0; iw < sightings.size(); ++iw) {
            if (day_of(sightings[iw].t_utc) != scene_day) continue;
            if (!point_in_ring(sightings[iw].lat, sightings[iw].lon, scenes[is].ring))
                continue;
            out.push_back({iw, is});
        }
    }
    return out;
}

std::vector<YearSummary> summarize_counts(
    const std::vector<Collocation>& matches,
    const std::vector<SceneRecord>& scenes,
    const std::vector<Sighting>& sightings) {
    std::map<int, YearSummary> by_year;
    for (const auto& s : sightings) {
        auto& row = by_year[year_of(s.t_utc)];
        ++row.group_sightings;
        row.individual_sightings += static_cast<std::size_t>(s.count);
    }
    for (const auto& sc : scenes) ++by_year[year_of(sc.t_utc)].scenes;

    std::map<int, std::set<std::size_t>> scenes_hit;
    std::map<int, std::set<std::size_t>> sightings_hit;
    for (const auto& m : matches) {
        const int year = year_of(scenes[m.scene_index].t_utc);
        scenes_hit[year].insert(m.scene_index);
        sightings_hit[year].insert(m.sighting_index);
    }
    for (auto& [year, row] : by_year) {
        row.year = year;
        auto sh = scenes_hit.find(year);
        if (sh != scenes_hit.end()) row.scenes_with_whales = sh->second.size();
        auto wh = sightings_hit.find(year);
        if (wh != sightings_hit.end()) {
            row.group_in_scenes = wh->second.size();
            for (std::size_t iw : wh->second)
                row.individual_in_scenes += static_cast<std::size_t>(sightings[iw].count);
        }
    }
    std::vector<YearSummary> out;
    for (const auto& [year, row] : by_year) {
        (void)year;
        out.push_back(row);
    }
    return out;
}

void write_summary_csv(const std::vector<YearSummary>& summary,
                       const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    auto pct = [](std::size_t part, std::size_t total) {
        return total == 0 ? 0L : std::lround(100.0 * static_cast<double>(part) /
                                             static_cast<double>(total));
    };
    out << "year,group_sightings,individual_sightings,scenes,"
           "scenes_with_whales,scenes_with_whales_pct,"
           "group_in_scenes,group_in_scenes_pct,"
           "individual_in_scenes,individual_in_scenes_pct\n";
    for (const auto& r : summary) {
        out << r.year << "," << r.group_sightings << "," << r.individual_sightings
            << "," << r.scenes << "," << r.scenes_with_whales << ","
            << pct(r.scenes_with_whales, r.scenes) << "," << r.group_in_scenes
            << "," << pct(r.group_in_scenes, r.group_sightings) << ","
            << r.individual_in_scenes << ","
            << pct(r.individual_in_scenes, r.individual_sightings) << "\n";
    }
    if (!out) throw DataError("short write: " + path);
}

std::map<std::string, HourlyWind> domain_wind_series(
    const std::vector<WindRecord>& wind,
    const std::vector<std::pair<std::string, std::pair<double, double>>>& gridboxes) {
    // Unique cells present in the wind file.
    std::set<std::pair<double, double>> cells;
    for (const auto& r : wind) cells.insert({r.lat, r.lon});

    std::map<std::string, HourlyWind> out;
    for (const auto& [name, box] : gridboxes) {
        if (cells.empty()) {
            out[name];
            continue;
        }
        std::pair<double, double> best = *cells.begin();
        double best_d2 = 1e300;
        for (const auto& cell : cells) {
            const double dlat = cell.first - box.first;
            const double dlon = cell.second - box.second;
            const double d2 = dlat * dlat + dlon * dlon;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = cell;
            }
        }
        HourlyWind series;
        for (const auto& r : wind)
            if (r.lat == best.first && r.lon == best.second)
                series[hour_of(r.t_utc)] = r.speed();
        out[name] = std::move(series);
    }
    return out;
}

BinResult bin_hourly(const std::vector<SceneSample>& samples,
                     const std::map<std::string, HourlyWind>& wind_by_domain,
                     const std::vector<int>& deltas, double u_min, double u_max) {
    BinResult out;

    // Average same-domain same-hour samples into one contrast value.
    std::map<std::pair<std::string, std::int64_t>, std::pair<double, std::size_t>> bins;
    for (const auto& s : samples) {
        auto& acc = bins[{s.domain, hour_of(s.t_utc)}];
        acc.first += s.c;
        ++acc.second;
    }

    for (const auto& [key, acc] : bins) {
        const auto& [domain, hour] = key;
        auto wit = wind_by_domain.find(domain);
        if (wit == wind_by_domain.end()) {
            ++out.dropped_missing_wind;
            continue;
        }
        const HourlyWind& wind = wit->second;
        auto u0 = wind.find(hour);
        if (u0 == wind.end()) {
            ++out.dropped_missing_wind;
            continue;
        }
        if (u0->second < u_min || u0->second > u_max) {
            ++out.dropped_wind_range;
            continue;
        }
        DomainSample d;
        d.domain = domain;
        d.t_hour = hour;
        d.c = acc.first / static_cast<double>(acc.second);
        d.u0 = u0->second;
        bool complete = true;
        for (int delta : deltas) {
            std::array<double, 4> lagged{};
            const std::array<std::int64_t, 4> offsets{-2LL * delta, -1LL * delta,
                                                      1LL * delta, 2LL * delta};
            for (std::size_t k = 0; k < offsets.size() && complete; ++k) {
                auto it = wind.find(hour + offsets[k]);
                if (it == wind.end())
                    complete = false;
                else
                    lagged[k] = it->second;
            }
            if (!complete) break;
            d.lags[delta] = lagged;
        }
        if (!complete) {
            ++out.dropped_missing_wind;
            continue;
        }
        out.samples.push_back(std::move(d));
    }
    return out;
}

PairedSeries to_paired_series(const std::vector<DomainSample>& samples,
                              const std::string& domain,
                              const std::vector<int>& deltas) {
    std::vector<const DomainSample*> rows;
    for (const auto& s : samples)
        if (s.domain == domain) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [](const DomainSample* a, const DomainSample* b) {
        return a->t_hour < b->t_hour;
    });

    PairedSeries series;
    for (int d : deltas) series.lags[d];
    for (const auto* s : rows) {
        series.c.push_back(s->c);
        series.u0.push_back(s->u0);
        series.t_hour.push_back(s->t_hour);
        for (int d : deltas) {
            auto it = s->lags.find(d);
            if (it == s->lags.end())
                throw DataError("sample at " + format_iso_hour(s->t_hour) +
                                " lacks lagged wind for delta " + std::to_string(d));
            series.lags[d].m2.push_back(it->second[0]);
            series.lags[d].m1.push_back(it->second[1]);
            series.lags[d].p1.push_back(it->second[2]);
            series.lags[d].p2.push_back(it->second[3]);
        }
    }
    return series;
}

void write_series_csv(const std::vector<DomainSample>& samples,
                      const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "domain,iso_utc_hour,C,U_0,U_m2,U_m1,U_p1,U_p2,delta_h\n";
    std::vector<const DomainSample*> rows;
    for (const auto& s : samples) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [](const DomainSample* a, const DomainSample* b) {
        if (a->domain != b->domain) return a->domain < b->domain;
        return a->t_hour < b->t_hour;
    });
    for (const auto* s : rows) {
        for (const auto& [delta, lag] : s->lags) {
            out << s->domain << "," << format_iso_hour(s->t_hour) << ","
                << fmt_double(s->c) << "," << fmt_double(s->u0) << ","
                << fmt_double(lag[0]) << "," << fmt_double(lag[1]) << ","
                << fmt_double(lag[2]) << "," << fmt_double(lag[3]) << ","
                << delta << "\n";
        }
    }
    if (!out) throw DataError("short write: " + path);
}

std::vector<DomainSample> read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open series file: " + path);
    std::map<std::pair<std::string, std::int64_t>, DomainSample> by_key;
    std::vector<std::pair<std::string, std::int64_t>> order;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv(t);
        if (!fields.empty() && fields[0] == "domain") continue;
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 9)
            throw DataError(where + ": expected 9 columns");
        try {
            const std::string& domain = fields[0];
            const std::int64_t hour = hour_of(parse_iso_utc(fields[1]));
            const double c = parse_double(fields[2], "C");
            const double u0 = parse_double(fields[3], "U_0");
            std::array<double, 4> lag{
                parse_double(fields[4], "U_m2"), parse_double(fields[5], "U_m1"),
                parse_double(fields[6], "U_p1"), parse_double(fields[7], "U_p2")};
            const int delta = static_cast<int>(parse_int(fields[8], "delta_h"));
            if (delta <= 0) throw DataError("delta_h must be positive");
            const auto key = std::make_pair(domain, hour);
            auto it = by_key.find(key);
            if (it == by_key.end()) {
                DomainSample s;
                s.domain = domain;
                s.t_hour = hour;
                s.c = c;
                s.u0 = u0;
                s.lags[delta] = lag;
                by_key[key] = std::move(s);
                order.push_back(key);
            } else {
                if (it->second.c != c || it->second.u0 != u0)
                    throw DataError("inconsistent C or U_0 across delta rows");
                it->second.lags[delta] = lag;
            }
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    std::vector<DomainSample> out;
    out.reserve(order.size());
    for (const auto& key : order) out.push_back(std::move(by_key[key]));
    return out;
}

} // namespace sarfil
