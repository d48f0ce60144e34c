// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration. Files are a YAML subset: a mapping of sections,
// each a mapping of keys to scalars or flow lists of numbers,
//
//   run:
//     experiment: cavity
//     seed: 7
//   cavity:
//     t2_charge: [400, 100, 50]
//
// Every value is addressed as "section.key" and may be overridden from the
// environment as QLINK_<SECTION>_<KEY>, e.g. QLINK_CAVITY_T2_CHARGE=100.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qlink::exp {

enum class Kind { Real, Integer, Flag, Text, RealList };

struct SchemaEntry {
    std::string path;
    Kind kind;
    std::string fallback;  // default, canonical text form
    std::string help;
    std::vector<std::string> choices;  // Text only; empty = free text
};

// Shortest text that parses back to the same double.
std::string format_number(double x);

const std::vector<SchemaEntry>& schema();
// One line per key with its default, for --help.
std::string schema_help();

class Config {
public:
    static Config parse(const std::string& yaml, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    // Raw (unvalidated) assignment; validate() checks it later.
    void set(const std::string& path, const std::string& value);
    // Applies QLINK_<SECTION>_<KEY> overrides found through `getenv`.
    void apply_env(const std::function<const char*(const char*)>& getenv);
    // Fills defaults and checks keys, types and choices; errors name the field path.
    void validate();

    bool has(const std::string& path) const { return values_.count(path) > 0; }
    double real(const std::string& path) const;
    long integer(const std::string& path) const;
    bool flag(const std::string& path) const;
    const std::string& text(const std::string& path) const;
    std::vector<double> reals(const std::string& path) const;
    std::uint64_t seed() const { return std::uint64_t(integer("run.seed")); }

    // Sorted "path = value" lines; the hash is SHA-256 of this text.
    std::string canonical() const;
    std::string hash() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace qlink::exp
