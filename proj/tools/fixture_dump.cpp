// Writes the fixture tree (corpus, topics, assessments, equivalence files)
// to a directory; used to regenerate data/ after editing the fixtures.

#include <iostream>

#include "casret/fixtures.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: fixture_dump <output_dir>\n";
        return 2;
    }
    try {
        casret::fixtures::write_fixture_tree(argv[1]);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    std::cout << "fixture tree written to " << argv[1] << '\n';
    return 0;
}
