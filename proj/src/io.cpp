#include "gamebsde/io.hpp"

#include <cstdio>
#include <sstream>

namespace gbsde {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string solution_csv(const SolutionField& sol, int dim, const StoppingPolicy* stopping) {
    std::ostringstream out;
    out << "level,node_index,y";
    for (int i = 1; i <= dim; ++i)
        out << ",z_" << i;
    out << ",a";
    if (stopping)
        out << ",stop";
    out << '\n';
    const int last = sol.terminal_level();
    for (int k = 0; k <= last; ++k) {
        const Vec& y = sol.y[static_cast<std::size_t>(k)].values;
        for (Index n = 0; n < y.size(); ++n) {
            out << k << ',' << n << ',' << format_double(y(n));
            for (int i = 0; i < dim; ++i) {
                out << ',';
                if (k < last)
                    out << format_double(sol.z[static_cast<std::size_t>(k)].values(n, i));
            }
            out << ',' << format_double(sol.a[static_cast<std::size_t>(k)].values(n));
            if (stopping)
                out << ',' << (stopping->stops(k, n) ? 1 : 0);
            out << '\n';
        }
    }
    return out.str();
}

} // namespace gbsde
