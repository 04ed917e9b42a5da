#pragma once

#include "igl/semantics.hpp"

namespace oracle {

using namespace igl;

// Satisfaction straight from the clauses, no sharing with the library.
inline bool sat(const BirelModel& m, int w, Formula f) {
    int n = m.size();
    switch (f->op) {
        case Op::Atom: return m.val[w].count(f->name) > 0;
        case Op::Bot: return false;
        case Op::And: return sat(m, w, f->a) && sat(m, w, f->b);
        case Op::Or: return sat(m, w, f->a) || sat(m, w, f->b);
        case Op::Imp:
            for (int v = 0; v < n; ++v)
                if (m.leq[w][v] && sat(m, v, f->a) && !sat(m, v, f->b)) return false;
            return true;
        case Op::Box:
            for (int v = 0; v < n; ++v)
                if (m.leq[w][v])
                    for (int u = 0; u < n; ++u)
                        if (m.acc[v][u] && !sat(m, u, f->a)) return false;
            return true;
        case Op::Dia:
            for (int u = 0; u < n; ++u)
                if (m.acc[w][u] && sat(m, u, f->a)) return true;
            return false;
    }
    return false;
}

}  // namespace oracle
