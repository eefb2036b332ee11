// Copyright 2026 The phaseloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phaseloss/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace phaseloss::io {

std::string format_number(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_number(const std::string &text) {
    if (text == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (text == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double value = 0.0;
    const char *begin = text.data();
    const char *end = text.data() + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
        throw std::runtime_error("not a number: '" + text + "'");
    }
    return value;
}

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

WeightsFile read_weights(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open weights file " + path.string());
    }
    WeightsFile file;
    std::string line;
    int line_number = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_number;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto fail = [&](const std::string &why) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_number) + ": " +
                                     why);
        };
        if (!header_seen) {
            if (line != "k,x_k") {
                fail("expected header 'k,x_k'");
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            fail("expected two comma-separated fields");
        }
        const std::string k_text = trim(line.substr(0, comma));
        const std::string x_text = trim(line.substr(comma + 1));
        int k = -1;
        const auto kr = std::from_chars(k_text.data(), k_text.data() + k_text.size(), k);
        if (kr.ec != std::errc() || kr.ptr != k_text.data() + k_text.size()) {
            fail("bad index '" + k_text + "'");
        }
        if (k != static_cast<int>(file.weights.size())) {
            fail("expected k = " + std::to_string(file.weights.size()) + ", got " + k_text);
        }
        double x = 0.0;
        try {
            x = parse_number(x_text);
        } catch (const std::runtime_error &e) {
            fail(e.what());
        }
        if (!(x >= 0.0) || !std::isfinite(x)) {
            fail("weight must be finite and non-negative");
        }
        file.weights.push_back(x);
    }
    if (!header_seen) {
        throw std::runtime_error(path.string() + ": empty weights file");
    }
    if (file.weights.size() < 2) {
        throw std::runtime_error(path.string() + ": need rows for k = 0..n with n >= 1");
    }
    double total = 0.0;
    for (double x : file.weights) {
        total += x;
    }
    if (total <= 0.0) {
        throw std::runtime_error(path.string() + ": weights sum to zero");
    }
    if (std::abs(total - 1.0) > 1e-9) {
        file.warnings.push_back(path.string() + ": weights sum to " + format_number(total) +
                                ", renormalized");
    }
    for (double &x : file.weights) {
        x /= total;
    }
    return file;
}

void write_weights(const std::filesystem::path &path, const std::vector<double> &weights) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        rows.push_back({std::to_string(k), format_number(weights[k])});
    }
    write_csv(out, {"k", "x_k"}, rows);
}

void write_csv(std::ostream &out, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows) {
    auto line = [&](const std::vector<std::string> &fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            out << (i ? "," : "") << fields[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto &r : rows) {
        line(r);
    }
}

}  // namespace phaseloss::io
