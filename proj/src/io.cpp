#include "mbcs/io.hpp"

#include <charconv>

namespace mbcs {

nlohmann::json unitary_to_json(const UnitaryMatrix& u) {
    const int m = u.dimension();
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int r = 0; r < m; ++r) {
        nlohmann::json re_row = nlohmann::json::array(), im_row = nlohmann::json::array();
        for (int c = 0; c < m; ++c) {
            re_row.push_back(u.matrix()(r, c).real());
            im_row.push_back(u.matrix()(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return nlohmann::json{{"m", m}, {"re", std::move(re)}, {"im", std::move(im)}};
}

UnitaryMatrix unitary_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("m") || !j.contains("re") || !j.contains("im")) {
        throw ValidationError("unitary document must contain m, re and im");
    }
    const int m = j.at("m").get<int>();
    if (m < 1) throw ValidationError("unitary dimension must be at least 1");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != m || static_cast<int>(im.size()) != m) {
        throw ValidationError("unitary re/im must have m rows");
    }
    Eigen::MatrixXcd mat(m, m);
    for (int r = 0; r < m; ++r) {
        if (static_cast<int>(re[r].size()) != m || static_cast<int>(im[r].size()) != m) {
            throw ValidationError("unitary re/im must have m columns per row");
        }
        for (int c = 0; c < m; ++c) {
            mat(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
        }
    }
    return UnitaryMatrix(std::move(mat));
}

nlohmann::json distribution_to_json(const OutputDistribution& dist) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [sample, p] : dist.entries) {
        entries.push_back(nlohmann::json{{"ports", sample.ports()}, {"p", p}});
    }
    return nlohmann::json{
        {"m", dist.m}, {"n", dist.n}, {"mode", to_string(dist.mode)}, {"entries", entries}};
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string records_to_csv(const std::vector<SampleRecord>& records) {
    std::string out;
    if (records.empty()) return out;
    const int n = records.front().ports.size();
    for (int j = 1; j <= n; ++j) out += "port_" + std::to_string(j) + ",";
    for (int j = 1; j <= n; ++j) out += "t_" + std::to_string(j) + ",";
    for (int j = 1; j <= n; ++j) {
        out += "pol_" + std::to_string(j);
        out += (j < n) ? "," : "\n";
    }
    for (const auto& record : records) {
        for (int j = 0; j < n; ++j) out += std::to_string(record.ports.ports()[j]) + ",";
        for (int j = 0; j < n; ++j) out += format_double(record.times[j]) + ",";
        for (int j = 0; j < n; ++j) {
            out += record.polarizations[j] == 0 ? "e1" : "e2";
            out += (j + 1 < n) ? "," : "\n";
        }
    }
    return out;
}

std::string port_samples_to_csv(const std::vector<PortSample>& samples) {
    std::string out;
    if (samples.empty()) return out;
    const int n = samples.front().size();
    for (int j = 1; j <= n; ++j) {
        out += "port_" + std::to_string(j);
        out += (j < n) ? "," : "\n";
    }
    for (const auto& sample : samples) {
        for (int j = 0; j < n; ++j) {
            out += std::to_string(sample.ports()[j]);
            out += (j + 1 < n) ? "," : "\n";
        }
    }
    return out;
}

}  // namespace mbcs
