#pragma once
// CSV tables and JSON reports. Numbers are written in shortest round-trip
// form, so equal inputs give byte-identical files.
//
// risk CSV:    n,estimator,f_id,mse,se,reps,seed
// modulus CSV: epsilon,value,status,m

#include "lfadapt/adaptive.hpp"
#include "lfadapt/harness.hpp"
#include "lfadapt/modulus.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace lfa {

std::string format_number(double x);

void write_risk_csv(std::ostream& os, const std::vector<RiskReport>& rows);
void write_modulus_csv(std::ostream& os, const std::vector<ModulusResult>& rows, int m);
void write_text_file(const std::string& path, const std::string& content);

nlohmann::json to_json(const std::vector<ModulusRecord>& log);
nlohmann::json to_json(const TestConstants& c);
nlohmann::json to_json(const LadderConstants& c);
nlohmann::json to_json(const GridLadder& g);
nlohmann::json to_json(const NonnestedReport& r);
nlohmann::json to_json(const ContinuumReport& r);
nlohmann::json to_json(const RiskReport& r);
nlohmann::json to_json(const RateFit& f);
nlohmann::json to_json(const Provenance& p);

}  // namespace lfa
