// dpp-sat: encodes a DIMACS CNF formula as a simple-futures process whose
// target is reachable iff the formula is satisfiable.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dpp/corpus.hpp"

int main(int argc, char** argv) {
    CLI::App app{"DIMACS CNF to process encoding"};
    std::string input;
    std::string out;
    std::uint64_t seed = 0;
    bool random = false;
    app.add_option("input", input, "DIMACS file (default: standard input)");
    app.add_option("--out", out, "Output file (default: standard output)");
    app.add_flag("--random", random, "Encode a random 3-CNF instead of reading one");
    app.add_option("--seed", seed, "Seed for --random")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        dpp::Cnf cnf;
        if (random) {
            dpp::Rng rng(seed);
            cnf = dpp::random_3cnf(rng);
            std::cerr << dpp::to_dimacs(cnf);
        } else {
            std::stringstream text;
            if (input.empty()) {
                text << std::cin.rdbuf();
            } else {
                std::ifstream in(input);
                if (!in) {
                    std::cerr << "cannot read " << input << "\n";
                    return 2;
                }
                text << in.rdbuf();
            }
            cnf = dpp::parse_dimacs(text.str());
        }
        const std::string encoded = dpp::to_text(dpp::encode_sat(cnf));
        if (out.empty()) {
            std::cout << encoded;
        } else {
            std::ofstream(out) << encoded;
        }
    } catch (const dpp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
