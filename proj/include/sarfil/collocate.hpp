#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sarfil/gmf.hpp"
#include "sarfil/stats.hpp"
#include "sarfil/timeutil.hpp"

namespace sarfil {

struct GeoBounds {
    double lat_min = 40.0, lat_max = 55.0;
    double lon_min = -72.0, lon_max = -55.0;
};

struct Sighting {
    std::string source;   // database id, e.g. "A" or "B"
    std::int64_t t_utc = 0;
    double lat = 0.0, lon = 0.0;
    int count = 1;        // individuals in the group
    bool dead = false;
};

// CSV columns: source, iso_utc, lat, lon, count, dead_flag (optional).
// Unparseable or out-of-bounds rows are rejected with a line-numbered
// report rather than aborting the load.
struct SightingLoad {
    std::vector<Sighting> rows;
    std::vector<std::string> rejects;  // "line N: reason"
};
SightingLoad load_sightings(const std::string& path, const GeoBounds& bounds);

// Cross-source duplicates (same count, within 24 h and 0.01 deg in each of
// latitude and longitude) matched greedily nearest-in-time, each record at
// most once; the b-side copy is dropped. Dead-flagged records from either
// source are dropped before matching. Same-source near-repeats survive.
struct DedupParams {
    std::int64_t max_dt_s = 24 * 3600;
    double max_dlat = 0.01;
    double max_dlon = 0.01;
};
struct DedupResult {
    std::vector<Sighting> merged;  // time-sorted
    std::size_t removed = 0;       // duplicate b records dropped
    std::size_t dead_dropped = 0;
};
DedupResult dedup_sightings(std::vector<Sighting> a, std::vector<Sighting> b,
                            const DedupParams& params = {});

struct SceneRecord {
    std::string scene_id;
    std::int64_t t_utc = 0;
    Polarization pol = Polarization::VV;
    std::string grid_path;
    std::vector<std::pair<double, double>> ring;  // (lat, lon) bounding ring
    double track_heading_deg = 0.0;
};

// CSV columns: scene_id, iso_utc, pol, grid_path, track_heading, ring.
// The ring field is semicolon-separated "lat lon" pairs.
std::vector<SceneRecord> load_scene_catalog(const std::string& path);

struct WindRecord {
    std::int64_t t_utc = 0;
    double lat = 0.0, lon = 0.0;
    double u10 = 0.0, v10 = 0.0;

    double speed() const { return std::sqrt(u10 * u10 + v10 * v10); }
};

// CSV columns: iso_utc, lat, lon, u10, v10. Duplicate (time, lat, lon)
// rows: last wins, counted in duplicate_overwrites.
struct WindSeriesLoad {
    std::vector<WindRecord> rows;
    std::size_t duplicate_overwrites = 0;
};
WindSeriesLoad load_wind_series(const std::string& path);

// (sighting, scene) pairs sharing a UTC calendar date with the sighting
// inside the scene's bounding ring.
struct Collocation {
    std::size_t sighting_index = 0;
    std::size_t scene_index = 0;
};
std::vector<Collocation> collocate_day(const std::vector<Sighting>& sightings,
                                       const std::vector<SceneRecord>& scenes);

struct YearSummary {
    int year = 0;
    std::size_t group_sightings = 0;       // sighting records
    std::size_t individual_sightings = 0;  // summed group counts
    std::size_t scenes = 0;
    std::size_t scenes_with_whales = 0;
    std::size_t group_in_scenes = 0;
    std::size_t individual_in_scenes = 0;
};
std::vector<YearSummary> summarize_counts(
    const std::vector<Collocation>& matches,
    const std::vector<SceneRecord>& scenes,
    const std::vector<Sighting>& sightings);
void write_summary_csv(const std::vector<YearSummary>& summary,
                       const std::string& path);

// One scene's domain-averaged contrast magnitude.
struct SceneSample {
    std::string domain;
    std::int64_t t_utc = 0;
    double c = 0.0;
};

// One hourly binned record: contrast, wind at the overpass hour, and the
// four lagged wind samples per sampling interval.
struct DomainSample {
    std::string domain;
    std::int64_t t_hour = 0;
    double c = 0.0;
    double u0 = 0.0;
    std::map<int, std::array<double, 4>> lags;  // delta -> {m2, m1, p1, p2}
};

using HourlyWind = std::map<std::int64_t, double>;  // hour -> speed

// Wind speed series of the field cell nearest to each domain's gridbox.
std::map<std::string, HourlyWind> domain_wind_series(
    const std::vector<WindRecord>& wind,
    const std::vector<std::pair<std::string, std::pair<double, double>>>& gridboxes);

// Samples in the same domain and UTC hour are averaged; samples with wind
// outside [u_min, u_max] or without wind at the overpass hour or at any
// required lag hour are dropped (and counted).
struct BinResult {
    std::vector<DomainSample> samples;
    std::size_t dropped_wind_range = 0;
    std::size_t dropped_missing_wind = 0;
};
BinResult bin_hourly(const std::vector<SceneSample>& samples,
                     const std::map<std::string, HourlyWind>& wind_by_domain,
                     const std::vector<int>& deltas, double u_min = 1.0,
                     double u_max = 10.0);

// Per-domain series assembled from the binned samples (time-sorted).
PairedSeries to_paired_series(const std::vector<DomainSample>& samples,
                              const std::string& domain,
                              const std::vector<int>& deltas);

// CSV columns: domain, iso_utc_hour, C, U_0, U_m2, U_m1, U_p1, U_p2,
// delta_h; one row per overpass per delta.
void write_series_csv(const std::vector<DomainSample>& samples,
                      const std::string& path);
std::vector<DomainSample> read_series_csv(const std::string& path);

} // namespace sarfil
