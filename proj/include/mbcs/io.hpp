#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mbcs/averaged.hpp"
#include "mbcs/interferometer.hpp"
#include "mbcs/sampler.hpp"

namespace mbcs {

// Unitary JSON document: {"m": M, "re": [[..]], "im": [[..]]}, row-major.
nlohmann::json unitary_to_json(const UnitaryMatrix& u);
UnitaryMatrix unitary_from_json(const nlohmann::json& j);

// {"m":M, "n":N, "mode":"...", "entries":[{"ports":[..], "p":x}, ..]} sorted
// by canonical port order.
nlohmann::json distribution_to_json(const OutputDistribution& dist);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// CSV with header port_1..port_N,t_1..t_N,pol_1..pol_N; polarization labels
// are the strings e1/e2.
std::string records_to_csv(const std::vector<SampleRecord>& records);

// CSV with header port_1..port_N.
std::string port_samples_to_csv(const std::vector<PortSample>& samples);

}  // namespace mbcs
