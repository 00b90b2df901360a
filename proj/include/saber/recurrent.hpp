#pragma once

#include <string>
#include <vector>

#include "saber/params.hpp"

namespace saber {

enum class CellKind : int { Gru = 0, Lstm = 1 };

const char* cell_name(CellKind k);
CellKind cell_from_name(const std::string& name);

// r = sig(Wr x + Ur h + br), z = sig(Wz x + Uz h + bz),
// n = tanh(Wn x + Un (r*h) + bn), h' = (1-z)*n + z*h
struct GruCell {
    TensorRef Wr, Wz, Wn, Ur, Uz, Un, br, bz, bn;
    int in = 0, hidden = 0;
};

GruCell make_gru(ParamStore& ps, const std::string& name, int in, int hidden);

struct GruCache {
    std::vector<double> x, h_prev, r, z, n;
};

void gru_fwd(const double* p, const GruCell& c, const double* x, const double* h_prev, double* h_out,
             GruCache* cache);
// dx and dh_prev accumulate
void gru_bwd(const double* p, const GruCell& c, const GruCache& cache, const double* dh, double* g, double* dx,
             double* dh_prev);

struct LstmCell {
    TensorRef Wi, Wf, Wg, Wo, Ui, Uf, Ug, Uo, bi, bf, bg, bo;
    int in = 0, hidden = 0;
};

LstmCell make_lstm(ParamStore& ps, const std::string& name, int in, int hidden);

struct LstmCache {
    std::vector<double> x, h_prev, c_prev, i, f, gg, o, c;
};

void lstm_fwd(const double* p, const LstmCell& c, const double* x, const double* h_prev, const double* c_prev,
              double* h_out, double* c_out, LstmCache* cache);
void lstm_bwd(const double* p, const LstmCell& c, const LstmCache& cache, const double* dh, const double* dc,
              double* g, double* dx, double* dh_prev, double* dc_prev);

}  // namespace saber
