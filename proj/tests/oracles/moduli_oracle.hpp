#pragma once
// Generated by gen_moduli.py (cvxpy + Clarabel, every pair constraint explicit).

namespace oracle {

struct ModulusCase { const char* f1; const char* f2; int m; double eps; double omega; };
struct TangentCase { const char* f1; const char* f2; int m; double slope; double eps_star; double supval; };

inline const ModulusCase kModulus[] = {
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 33, 0.05, 0.15438999797275613},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 33, 0.2, 0.39109373663388075},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=0.5,M=1)", 33, 0.05, 0.18094240234101627},
    {"decreasing+lipschitz(alpha=0.5,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 33, 0.05, 0.18094240234101597},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=0.5,M=1)", 33, 0.3, 0.5906822040584414},
    {"left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.5,M=1)", "left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=1,M=1)", 65, 0.1, 0.4500553337629395},
    {"lipschitz(alpha=0.5,M=2)", "lipschitz(alpha=0.5,M=2)", 65, 0.1, 0.7324237252732447},
    {"lipschitz(alpha=0.5,M=1)", "lipschitz(alpha=0.5,M=1)", 257, 0.05, 0.409560716779222},
    {"decreasing+lipschitz(alpha=0.3,M=1)", "decreasing+lipschitz(alpha=0.7,M=1)", 257, 0.02, 0.14922939042165603},
    {"bounded(B=1)+lipschitz(alpha=1,M=1)", "bounded(B=1)+lipschitz(alpha=1,M=1)", 33, 0.1, 0.3087799959415837},
    {"bounded(B=1)+lipschitz(alpha=1,M=1)", "bounded(B=1)+lipschitz(alpha=1,M=1)", 33, 5.0, 1.999999999993665},
    {"lipschitz(alpha=1,M=1)", "lipschitz(alpha=1,M=1)", 64, 0.1, 0.31019636758368857},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 16, 0.1, 0.24393370002525686},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 32, 0.05, 0.154303168735431},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=0.5,M=1)", 32, 0.1, 0.29057112539654856},
    {"decreasing+lipschitz(alpha=0.5,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 32, 0.1, 0.2905711253959504},
    {"lipschitz(alpha=0.5,M=1)", "lipschitz(alpha=0.5,M=1)", 32, 0.1, 0.5162599746683527},
    {"left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.5,M=1)", "left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=1,M=1)", 31, 0.1, 0.4317964589052266},
    {"bounded(B=1)+lipschitz(alpha=1,M=1)", "bounded(B=1)+lipschitz(alpha=1,M=1)", 16, 0.3, 0.642369037126068},
    {"decreasing+lipschitz(alpha=0.3,M=1)", "decreasing+lipschitz(alpha=0.7,M=1)", 24, 0.05, 0.21609938736119078},
    {"decreasing+left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=0.25,M=1)", "decreasing+left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.75,M=1)", 32, 0.05, 0.2673758870861161},
    {"decreasing+left_lipschitz(alpha=1,M=1)+right_lipschitz(alpha=0.75,M=1)", "decreasing+left_lipschitz(alpha=0.5,M=1)+right_lipschitz(alpha=0.25,M=1)", 32, 0.05, 0.18052141615742107},
};

inline const TangentCase kTangent[] = {
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=1,M=1)", 65, 3.0, 0.016933835028564576, 0.02415317080373469},
    {"decreasing+lipschitz(alpha=1,M=1)", "decreasing+lipschitz(alpha=0.5,M=1)", 65, 5.0, 0.0072124246155824715, 0.010455189936296301},
    {"lipschitz(alpha=0.5,M=1)", "lipschitz(alpha=0.5,M=1)", 129, 4.0, 0.0611007052275782, 0.20061661780332846},
};

}  // namespace oracle
