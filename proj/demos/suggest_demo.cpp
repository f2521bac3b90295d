// Runs the proposal funnel against the built-in catalog and shows the vote
// tally, the elected features, and what expansion would add next.
#include <cstdio>
#include <string>
#include <vector>

#include "toolforge/suggest/suggest.hpp"

using namespace toolforge;

int main() {
    CatalogBackend backend;
    ProposeResult result = propose("pull the puck back across the table", "stick",
                                   backend, 10, 12, 6, 7);

    std::printf("votes over %zu runs:\n", result.tally.runs.size());
    for (const auto& [name, votes] : result.tally.counts)
        std::printf("  %-22s %zu\n", name.c_str(), votes);

    std::printf("\nelected (top %zu):\n", result.features.size());
    for (const std::string& f : result.features) std::printf("  %s\n", f.c_str());
    for (const std::string& f : result.uneditable)
        std::printf("  [uneditable: %s]\n", f.c_str());

    std::vector<std::string> more = expand(result.features, "stick", backend, 2, 7);
    std::printf("\nexpansion would add next:");
    for (const std::string& f : more) std::printf(" %s", f.c_str());
    std::printf("\n");
    return 0;
}
