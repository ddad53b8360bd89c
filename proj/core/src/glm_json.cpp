#include <json.hpp>

#include "ttf/glm.hpp"

namespace ttf {

using ordered_json = nlohmann::ordered_json;

std::string to_json(const GlmModel& model, int indent)
{
    ordered_json doc;
    doc["target"] = std::string(to_string(model.target));
    doc["fixed_p"] = model.fixed_p;
    doc["intercept"] = model.intercept;
    doc["coefficients"] = ordered_json::object();
    for (const auto& [name, coef] : model.coefficients)
        doc["coefficients"][name] = coef;
    doc["loglik"] = model.loglik;
    doc["aic"] = model.aic;
    doc["trail"] = ordered_json::array();
    for (const auto& step : model.trail)
        doc["trail"].push_back({{"column", step.column}, {"aic", step.aic}});
    return doc.dump(indent);
}

GlmModel glm_model_from_json(std::string_view text)
{
    try {
        const auto doc = ordered_json::parse(text);
        GlmModel model;
        model.target = parse_target(doc.at("target").get<std::string>());
        model.fixed_p = doc.at("fixed_p").get<double>();
        model.intercept = doc.at("intercept").get<double>();
        for (const auto& [name, coef] : doc.at("coefficients").items())
            model.coefficients.emplace_back(name, coef.get<double>());
        model.loglik = doc.at("loglik").get<double>();
        model.aic = doc.at("aic").get<double>();
        if (doc.contains("trail"))
            for (const auto& step : doc.at("trail"))
                model.trail.push_back({step.at("column").get<std::string>(), step.at("aic").get<double>()});
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed GLM model JSON: ") + e.what());
    }
}

} // namespace ttf
