#pragma once

// Metric specifications: a symmetric matrix of component expressions on the
// end chart R^n \ B_{R0}, plus scalar parameters. Built-in catalog entries
// cover the standard asymptotically Euclidean examples; arbitrary metrics
// load from JSON files.

#include "aecurv/expr.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aecurv {

struct MetricSpec {
    int dim = 0;
    // Row-major upper triangle, size dim*(dim+1)/2: (0,0), (0,1), ..., (1,1), ...
    std::vector<ExprPtr> upper;
    std::map<std::string, double> params;
    double inner_radius = 1.0; // chart domain is |x| >= inner_radius
    double decay = 0.0;        // declared decay rate tau, 0 if unknown
    std::string name = "custom";

    int upper_index(int i, int j) const;
    const ExprPtr& component(int i, int j) const; // symmetric access

    // Value-level evaluation, full symmetric matrix (row-major dim x dim).
    std::vector<double> evaluate(const std::vector<double>& point) const;
};

struct CatalogParam {
    std::string name;
    bool is_expression = false;
    std::string default_value; // printable default, may depend on n
};

struct CatalogEntry {
    std::string name;
    std::string summary;
    std::vector<CatalogParam> params;
};

const std::vector<CatalogEntry>& catalog_entries();

// Build a catalog metric. Values in `params` are parsed as numbers or as
// component expressions depending on the parameter. Unknown names are config
// errors. Recognized everywhere: n (dimension), inner_radius, decay.
MetricSpec catalog_metric(const std::string& name,
                          const std::map<std::string, std::string>& params = {});

MetricSpec load_metric_file(const std::string& path);
void save_metric_file(const MetricSpec& spec, const std::string& path);
MetricSpec metric_from_json_text(const std::string& text);
std::string metric_to_json_text(const MetricSpec& spec);

struct MetricValidation {
    bool positive_definite = true;
    double min_pivot = 0.0; // smallest Cholesky pivot seen across all samples
    std::vector<std::string> warnings;
};

// Samples 64 quasi-random points in each of four dyadic annuli above
// inner_radius and runs a Cholesky factorization at each. Failure to factor
// is fatal (positive_definite = false); a declared decay rate that the
// samples contradict only adds a warning.
MetricValidation validate_metric(const MetricSpec& spec, std::uint64_t seed = 1);

} // namespace aecurv
