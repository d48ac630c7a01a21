#include <iostream>

#include "agreement/agreement.hpp"

int main()
{
    using namespace agreement;

    // Two taxonomies that overlap on a and r.
    Profile profile = parse_profile("((a,b)x,c)r;\n(a,d)r;\n");

    SolveResult result = solve(profile);
    if (!result.tree) {
        std::cout << "no agreement tree\n";
        return 1;
    }
    std::cout << serialize_newick(*result.tree, result.normalized.profile.table(), true) << '\n';
    std::cout << "clusters check: " << verify_by_clusters(profile, *result.tree) << '\n';
    std::cout << "embedding check: " << verify_by_embedding(profile, *result.tree) << '\n';
}
