#pragma once

#include "malbench/dataset.hpp"
#include "malbench/forest.hpp"
#include "malbench/linear.hpp"

namespace malbench {

// Estimator behind recursive feature elimination. Only families that expose
// per-feature importance qualify: logistic regression (|coefficient| on
// standardized data) or random forest (impurity importance).
struct RfeEstimatorConfig {
    std::string id = "logreg";  // logreg | forest
    LogRegConfig logreg;
    ForestConfig forest;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static RfeEstimatorConfig from_json(const nlohmann::json& j);
};

struct RfeResult {
    std::vector<std::string> selected;    // kept columns, lexicographic order
    std::map<std::string, int> ranking;   // 1 = kept; larger = eliminated earlier
    std::string estimator_id;
    std::size_t step = 1;
    std::vector<std::size_t> fitted_row_ids;  // leakage audit; not serialized

    nlohmann::json to_json() const;
    static RfeResult from_json(const nlohmann::json& j);
};

// Repeatedly refits the estimator and drops the `step` lowest-importance
// features until k remain. Importance ties drop the lexicographically later
// name first. Work happens in canonical (lexicographic) column order, so the
// result is invariant to the input column order.
RfeResult rfe(const Dataset& train, std::size_t k, const RfeEstimatorConfig& estimator,
              std::size_t step = 1);

// Projects the dataset onto the selected columns, preserving their original
// relative order; labels untouched.
Dataset apply_selection(const Dataset& data, const RfeResult& result);

}  // namespace malbench
