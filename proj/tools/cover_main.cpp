// Copyright 2026 The Covers Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "covers/problem.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "computes covers (uniform quantifier-free interpolants) of "
        "primitive formulas"};
    std::string path;
    covers::RunFlags flags;
    app.add_option("file", path, "problem file")->required();
    app.add_flag("--verify", flags.verify,
                 "check the cover against the input and a bounded residue "
                 "enumeration");
    app.add_flag("--trace", flags.trace,
                 "print engine transitions on stderr");
    app.add_option("--format", flags.format, "cover output form: raw or dnf")
        ->check(CLI::IsMember({"raw", "dnf"}));
    app.add_option("--jobs", flags.jobs,
                   "worker budget (the driver currently runs sequentially)")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        return 1;
    }
    std::ostringstream text;
    text << in.rdbuf();

    try {
        covers::ProblemFile pf = covers::parse_problem(text.str());
        return covers::run(pf, flags, std::cout, std::cerr);
    } catch (const covers::ParseError& e) {
        std::cerr << path << ":" << e.what() << "\n";
        return 1;
    } catch (const covers::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
