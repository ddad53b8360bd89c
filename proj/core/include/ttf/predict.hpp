#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ttf/glm.hpp"
#include "ttf/model.hpp"

namespace ttf {

/// Mean epoch duration under the base model:
///   (1 - e^{-2mu})/4 * ((mu+1)/l1 + (mu+1)/l2) + (1 + e^{-2mu})/4 * ((mu+2p)/l1 + (mu+2(1-p))/l2)
/// Throws Error(DomainError) outside l1, l2 > 0, mu >= 0, 0 <= p <= 1.
double expected_time_to_fail(double lambda1, double lambda2, double mu, double p);

/// Contribution of epochs with an odd event count r:
///   mu/4 (1 - e^{-2mu}) (1/l1 + 1/l2) + 1/2 (1 + e^{-2mu}) (p/l1 + (1-p)/l2)
double expected_time_odd_part(double lambda1, double lambda2, double mu, double p);

/// Contribution of epochs with an even event count r:
///   1/4 (1/l1 + 1/l2) (mu (1 + e^{-2mu}) + (1 - e^{-2mu}))
double expected_time_even_part(double lambda1, double lambda2, double mu);

struct Prediction {
    std::optional<std::int64_t> epoch_id;   // absent for the out-of-sample row
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::optional<double> mu;
    double p = 0.0;
    double expected_ttf = 0.0;
    std::vector<std::string> warnings;
};

/// One regression per base-model rate.
struct PredictionModels {
    GlmModel lambda1;
    GlmModel lambda2;
    GlmModel mu;
};

/// Evaluates each model at the epoch's target-specific covariate means and
/// plugs the rates into expected_time_to_fail with p = fixed_p. An epoch with
/// no event of a needed kind falls back to dataset-wide means (warning).
/// Throws Error(MissingCovariate) when a model column is not a dataset sensor.
Prediction predict_epoch(const PredictionModels& models, const Dataset& data, std::int64_t epoch_id, double fixed_p);

/// predict_epoch over every complete epoch, in dataset order.
std::vector<Prediction> predict_all(const PredictionModels& models, const Dataset& data, double fixed_p);

/// Mean of the expected_ttf values; rates absent. Throws Error(EmptyList).
Prediction predict_out_of_sample(std::span<const Prediction> predictions);

struct PredictionMetrics {
    double mse = 0.0;
    double mae = 0.0;
    double max_error = 0.0;
    std::optional<double> correlation;  // absent when either side is constant
    std::size_t count = 0;
};

/// Throws Error(LengthMismatch) for unequal lengths, Error(InvalidArgument)
/// for fewer than 2 pairs.
PredictionMetrics prediction_metrics(std::span<const double> actual, std::span<const double> predicted);

/// Header: epoch_id,lambda1,lambda2,mu,p,expected_ttf. The out-of-sample row
/// has epoch_id "out_of_sample" and empty rate cells.
void write_predictions_csv(std::ostream& os, std::span<const Prediction> predictions);

} // namespace ttf
