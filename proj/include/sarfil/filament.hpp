#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sarfil/grid.hpp"

namespace sarfil {

// Parameters of the multi-resolution agreement rule.
struct AgreementParams {
    double threshold = 0.3;       // per-bracket contrast magnitude
    int connectivity = 8;         // 4 or 8
    double min_span_m = 10000.0;
    // (fine, coarse) pixel sizes of the three contrast brackets.
    std::vector<std::pair<double, double>> brackets = {
        {800.0, 1600.0}, {800.0, 3200.0}, {800.0, 6400.0}};
};

void validate_agreement_params(const AgreementParams& p);

// Per pixel: the mean of the three contrasts when all share a sign and each
// exceeds the threshold in magnitude, else 0; invalid when any input is.
// Symmetric in its grid arguments, bit for bit.
Grid agreement_average(const Grid& c1, const Grid& c2, const Grid& c3,
                       const AgreementParams& p);

// Labels of maximal connected components over the valid nonzero pixels,
// dense from 1 in scan order; 0 is background. Values are exact small
// integers so the grid stays exportable.
struct Labeling {
    Grid labels;
    int n_components = 0;
};
Labeling label_components(const Grid& avg, int connectivity);

// Agreement-averaged magnitude restricted to components that span at least
// min_span_m, with surviving components relabeled densely from 1.
struct FilamentField {
    Grid magnitude;                      // |avg| in retained filaments, else 0
    Grid labels;                         // component ids, 0 = background
    std::vector<double> component_spans; // meters, index = label - 1
};
FilamentField filter_span(const Grid& avg, const Labeling& labeling,
                          double min_span_m);

// Maximum pairwise pixel-centre distance of a component, in meters. Exact:
// convex hull on integer pixel coordinates, then integer squared distances.
double component_span_m(const std::vector<std::pair<int, int>>& pixels,
                        double pixel_size_m);

// One analysis domain: lat/lon ring plus its representative wind gridbox.
struct DomainPolygon {
    std::string name;
    std::vector<std::pair<double, double>> vertices; // (lat, lon), implicit ring
    double era5_lat = 0.0;
    double era5_lon = 0.0;
};

// CSV rows: "name,vertex_index,lat,lon" for ring vertices and
// "name,era5_lat,era5_lon" for the wind gridbox.
std::vector<DomainPolygon> load_domains(const std::string& path);

// Ray casting on (lat, lon); boundary points count as inside.
bool point_in_ring(double lat, double lon,
                   const std::vector<std::pair<double, double>>& ring);

// Mean of |magnitude| over valid pixels whose centres fall inside the
// polygon (zeros outside filaments included). Absent when the overlap falls
// below min_coverage_frac of the polygon's pixel-equivalent area.
struct DomainContrast {
    double c = 0.0;
    std::size_t overlap_pixels = 0;
};
std::optional<DomainContrast> domain_contrast(const FilamentField& field,
                                              const DomainPolygon& domain,
                                              double min_coverage_frac = 0.25);

} // namespace sarfil
