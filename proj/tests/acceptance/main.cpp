#include <chrono>
#include <cstdio>
#include <cstring>
#include <exception>
#include <set>
#include <string>

#include "acceptance.hpp"

namespace {

struct Entry {
    int id;
    const char* title;
    acceptance::Verdict (*run)();
};

const Entry kEntries[] = {
    {1, "gradient certification", acceptance::criterion1},
    {2, "copula correctness", acceptance::criterion2},
    {3, "small-instance posterior oracle", acceptance::criterion3},
    {4, "high-tau factor copula replication", acceptance::criterion4},
    {5, "scenario 1 joint model replication", acceptance::criterion5},
    {6, "gaussian-link correlation closed form", acceptance::criterion6},
    {7, "backtest calibration", acceptance::criterion7},
    {8, "HMC sanity", acceptance::criterion8},
};

int usage()
{
    std::fprintf(stderr, "usage: fcsv_acceptance [--criterion N]...\n");
    return 2;
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            try {
                wanted.insert(std::stoi(argv[++i]));
            } catch (const std::exception&) {
                return usage();
            }
        } else {
            return usage();
        }
    }
    for (int id : wanted) {
        if (id < 1 || id > 8) {
            return usage();
        }
    }

    bool all = true;
    for (const auto& e : kEntries) {
        if (!wanted.empty() && !wanted.count(e.id)) {
            continue;
        }
        std::printf("criterion %d: %s\n", e.id, e.title);
        std::fflush(stdout);
        const auto t0 = std::chrono::steady_clock::now();
        acceptance::Verdict v;
        try {
            v = e.run();
        } catch (const std::exception& ex) {
            v = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d (%s): %s [%.0f s]\n", v.pass ? "PASS" : "FAIL", e.id, e.title,
                    v.summary.c_str(), secs);
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
