#include "skeinforge/surface.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>
#include <sstream>

namespace skf {

namespace {
// internal: geometry hit a coincidence, retry with another seed
struct DegenerateGeometry {};
}  // namespace

// ------------------------------------------------------------------- words

Word inverse_word(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back({it->band, -it->sign});
  return r;
}

Word reduce_word(Word w) {
  Word out;
  for (const Letter& l : w) {
    if (!out.empty() && out.back().band == l.band && out.back().sign == -l.sign)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word cyclic_reduce(Word w) {
  w = reduce_word(std::move(w));
  while (w.size() >= 2 && w.front().band == w.back().band && w.front().sign == -w.back().sign) {
    w.erase(w.begin());
    w.pop_back();
  }
  return w;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// ----------------------------------------------------------------- Surface

int Surface::band_index(const std::string& name) const {
  for (int i = 0; i < num_bands(); ++i)
    if (names_[i] == name) return i;
  throw UnknownBand("no band named '" + name + "'");
}

void Surface::finish() {
  // Boundary tracing at slot granularity. Gap i sits after slot i (ccw);
  // crossing slot s continues at the gap after partner(s).
  int n = num_bands();
  genus_ = 0;
  boundary_ = 1;
  bwords_.clear();
  if (n > 0) {
    int gaps = 2 * n;
    std::vector<int> seen(gaps, 0);
    boundary_ = 0;
    for (int g0 = 0; g0 < gaps; ++g0) {
      if (seen[g0]) continue;
      ++boundary_;
      Word w;
      int g = g0;
      do {
        seen[g] = 1;
        int s = (g + 1) % gaps;
        w.push_back({slot_band(s), slot_sign(s)});
        g = partner_slot(s);
      } while (g != g0);
      bwords_.push_back(cyclic_reduce(w));
    }
    genus_ = (1 + n - boundary_) / 2;
  } else {
    bwords_.push_back({});
  }
  std::ostringstream os;
  os << "surface";
  for (int s = 0; s < num_end_slots(); ++s)
    os << " " << names_[slot_band(s)] << (slot_sign(s) > 0 ? "+" : "-");
  os << " marked " << marked_;
  spec_ = os.str();
}

SurfacePtr make_surface(const std::vector<std::string>& ends, int marked) {
  auto S = std::make_shared<Surface>();
  std::vector<std::string> names;
  std::vector<std::pair<std::string, int>> parsed;
  for (const std::string& e : ends) {
    if (e.size() < 2 || (e.back() != '+' && e.back() != '-'))
      throw MalformedSpec("band end '" + e + "' (want e.g. 'a+')");
    parsed.push_back({e.substr(0, e.size() - 1), e.back() == '+' ? 1 : -1});
  }
  for (auto& [nm, sg] : parsed)
    if (std::find(names.begin(), names.end(), nm) == names.end()) names.push_back(nm);
  if (names.size() > 60) throw MalformedSpec("too many bands");
  S->names_ = names;
  S->slot_band_.resize(parsed.size());
  S->slot_sign_.resize(parsed.size());
  std::vector<std::array<int, 2>> count(names.size(), {0, 0});
  for (size_t s = 0; s < parsed.size(); ++s) {
    int b = static_cast<int>(std::find(names.begin(), names.end(), parsed[s].first) -
                             names.begin());
    S->slot_band_[s] = b;
    S->slot_sign_[s] = parsed[s].second;
    S->end_slot_[b][parsed[s].second > 0 ? 0 : 1] = static_cast<int>(s);
    count[b][parsed[s].second > 0 ? 0 : 1]++;
  }
  for (size_t b = 0; b < names.size(); ++b)
    if (count[b][0] != 1 || count[b][1] != 1)
      throw MalformedSpec("band '" + names[b] + "' needs exactly one + and one - end");
  if (marked < 0) throw MalformedSpec("negative marked point count");
  S->marked_ = marked;
  S->finish();
  return S;
}

SurfacePtr with_marked(const SurfacePtr& s, int marked) {
  auto r = std::make_shared<Surface>(*s);
  r->marked_ = marked;
  r->finish();
  return r;
}

Word Surface::word_from_string(const std::string& s) const {
  Word w;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    int sign = 1;
    if (tok.size() > 1 && tok.back() == '\'') {
      sign = -1;
      tok.pop_back();
    } else if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      sign = -1;
      tok = tok.substr(0, tok.size() - 3);
    }
    w.push_back({band_index(tok), sign});
  }
  return w;
}

std::string Surface::letter_to_string(const Letter& l) const {
  return names_[l.band] + (l.sign > 0 ? "" : "'");
}

std::string Surface::word_to_string(const Word& w) const {
  std::string s;
  for (const Letter& l : w) {
    if (!s.empty()) s += " ";
    s += letter_to_string(l);
  }
  return s;
}

// ---------------------------------------------------------- canonical loops

namespace {
// positive letters sort before inverses, so canonical words read positively
bool word_less(const Word& a, const Word& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].band != b[i].band) return a[i].band < b[i].band;
    if (a[i].sign != b[i].sign) return a[i].sign > b[i].sign;
  }
  return a.size() < b.size();
}
}  // namespace

Word canonical_loop(const Word& w) {
  if (w.empty()) return w;
  Word best;
  bool have = false;
  for (int side = 0; side < 2; ++side) {
    Word cand = side == 0 ? w : inverse_word(w);
    for (size_t r = 0; r < cand.size(); ++r) {
      Word rot(cand.begin() + r, cand.end());
      rot.insert(rot.end(), cand.begin(), cand.begin() + r);
      if (!have || word_less(rot, best)) {
        best = rot;
        have = true;
      }
    }
  }
  return best;
}

std::string loop_key(const Surface& S, const Word& w) {
  return S.word_to_string(canonical_loop(w));
}

// ---------------------------------------------------------------- homology

bool HClass::is_zero() const {
  for (auto& c : v)
    if (c != 0) return false;
  return true;
}

HClass HClass::operator+(const HClass& o) const {
  HClass r = *this;
  for (size_t i = 0; i < v.size(); ++i) r.v[i] += o.v[i];
  return r;
}

HClass HClass::operator-(const HClass& o) const {
  HClass r = *this;
  for (size_t i = 0; i < v.size(); ++i) r.v[i] -= o.v[i];
  return r;
}

HClass HClass::operator*(const Rat& s) const {
  HClass r = *this;
  for (auto& c : r.v) c *= s;
  return r;
}

HClass homology_class(const Surface& S, const Word& w) {
  HClass h(S.num_bands());
  for (const Letter& l : w) h.v[l.band] += l.sign;
  return h;
}

// ------------------------------------------------------------ draw_strands

namespace {

int entry_slot(const Surface& S, const Letter& l) { return S.end_slot(l.band, l.sign); }
int exit_slot(const Surface& S, const Letter& l) { return S.end_slot(l.band, -l.sign); }

// Infinite slot itinerary of a strand walked into the disk from one
// touchpoint; alternates chord targets and band targets.
struct Walk {
  const Surface* S;
  const Strand* st;
  int pos;
  bool forward;
  bool dead = false;
  int emitted = 0;

  // returns next slot, or -1 once past an arc endpoint
  int next() {
    if (dead) return -1;
    int L = static_cast<int>(st->word.size());
    bool chord_step = (emitted % 2 == 0);
    ++emitted;
    if (chord_step) {
      if (forward) {
        if (!st->closed && pos + 1 >= L) {
          dead = true;
          return S->marked_slot(st->to_marked);
        }
        pos = (pos + 1) % L;
        return entry_slot(*S, st->word[pos]);
      } else {
        if (!st->closed && pos - 1 < 0) {
          dead = true;
          return S->marked_slot(st->from_marked);
        }
        pos = (pos - 1 + L) % L;
        return exit_slot(*S, st->word[pos]);
      }
    }
    return forward ? exit_slot(*S, st->word[pos]) : entry_slot(*S, st->word[pos]);
  }
};

struct Inst {
  int strand, pos;
  Letter l;
};

}  // namespace

int Diagram::tp_at(int slot, int depth) const {
  for (size_t i = 0; i < tps.size(); ++i)
    if (tps[i].slot == slot && tps[i].depth == depth) return static_cast<int>(i);
  return -1;
}

int Diagram::strands_through(int band) const {
  int k = 0;
  for (const auto& t : tps)
    if (S->is_end_slot(t.slot) && S->slot_band(t.slot) == band && S->slot_sign(t.slot) > 0) ++k;
  return k;
}

std::string Diagram::dump() const {
  std::ostringstream os;
  for (size_t i = 0; i < tps.size(); ++i)
    os << i << ": slot " << tps[i].slot << " depth " << tps[i].depth << " strand "
       << tps[i].strand << " pos " << tps[i].pos << "\n";
  for (auto& c : chords) os << "chord " << c.t_from << " -> " << c.t_to << "\n";
  return os.str();
}

Diagram draw_strands(SurfacePtr S, std::vector<Strand> strands, DepthPolicy policy) {
  Diagram d;
  d.S = S;
  d.strands = std::move(strands);
  const Surface& Sf = *S;

  for (auto& st : d.strands) {
    if (st.closed && st.word.empty()) throw SkeinError("cannot draw a trivial closed strand");
  }

  std::vector<std::vector<Inst>> through(Sf.num_bands());
  for (size_t s = 0; s < d.strands.size(); ++s)
    for (size_t p = 0; p < d.strands[s].word.size(); ++p) {
      Letter l = d.strands[s].word[p];
      through[l.band].push_back({static_cast<int>(s), static_cast<int>(p), l});
    }

  // Order instances at the "+" end of each band; the "-" end mirrors.
  // Canonical: forced embedded order. Two strands leaving one gate toward
  // chord targets u1 != u2 must satisfy: farther-ccw target sits at the
  // lower depth; recursing through shared prefixes costs an even number of
  // order flips, so the divergence rule applies verbatim at the base gate.
  auto comparator = [&](int plus_slot, const Inst& A, const Inst& B) -> bool {
    const Strand& sa = d.strands[A.strand];
    const Strand& sb = d.strands[B.strand];
    bool a_entry = A.l.sign > 0;  // entry touchpoint at the + end
    bool b_entry = B.l.sign > 0;
    Walk wa{&Sf, &sa, A.pos, !a_entry};
    Walk wb{&Sf, &sb, B.pos, !b_entry};
    int limit = 2 * static_cast<int>(sa.word.size() + sb.word.size()) + 8;
    int gate = plus_slot;
    int M = Sf.num_slots();
    for (int j = 0; j < limit; ++j) {
      int ta = wa.next(), tb = wb.next();
      if (ta != tb) {
        int da = (ta - gate + M) % M;
        int db = (tb - gate + M) % M;
        return da > db;  // farther ccw target -> first (lower depth)
      }
      gate = ta;
      if (wa.dead || wb.dead) break;
    }
    // Parallel tie: identical itineraries. Copies sit at consecutive
    // transverse offsets; at an entry touchpoint the left side of the
    // strand points ccw (higher depth), at an exit cw.
    bool asc = a_entry;
    if (policy == DepthPolicy::CanonicalVariant) asc = !asc;
    int ca = sa.copy_index, cb = sb.copy_index;
    if (ca != cb) return asc ? ca < cb : ca > cb;
    return asc ? A.pos < B.pos : A.pos > B.pos;
  };

  std::vector<std::map<std::pair<int, int>, int>> depth_plus(Sf.num_bands());
  for (int g = 0; g < Sf.num_bands(); ++g) {
    auto& insts = through[g];
    if (policy == DepthPolicy::Naive) {
      std::stable_sort(insts.begin(), insts.end(), [](const Inst& a, const Inst& b) {
        return std::tie(a.strand, a.pos) < std::tie(b.strand, b.pos);
      });
    } else {
      int plus = Sf.end_slot(g, 1);
      std::stable_sort(insts.begin(), insts.end(),
                       [&](const Inst& a, const Inst& b) { return comparator(plus, a, b); });
    }
    for (size_t r = 0; r < insts.size(); ++r)
      depth_plus[g][{insts[r].strand, insts[r].pos}] = static_cast<int>(r);
  }

  // touchpoints
  std::map<std::tuple<int, int, bool>, int> tp_index;  // (strand,pos,entry) -> tp
  std::map<int, int> marked_tp;                        // marked index -> tp
  auto add_tp = [&](Diagram::TP t) {
    d.tps.push_back(t);
    d.band_partner.push_back(-1);
    return static_cast<int>(d.tps.size() - 1);
  };
  for (size_t s = 0; s < d.strands.size(); ++s) {
    const Strand& st = d.strands[s];
    for (size_t p = 0; p < st.word.size(); ++p) {
      Letter l = st.word[p];
      int K = static_cast<int>(through[l.band].size());
      int dp = depth_plus[l.band][{static_cast<int>(s), static_cast<int>(p)}];
      int eslot = entry_slot(Sf, l), xslot = exit_slot(Sf, l);
      int edepth = (Sf.slot_sign(eslot) > 0) ? dp : K - 1 - dp;
      int xdepth = (Sf.slot_sign(xslot) > 0) ? dp : K - 1 - dp;
      int te = add_tp({eslot, edepth, static_cast<int>(s), static_cast<int>(p), true});
      int tx = add_tp({xslot, xdepth, static_cast<int>(s), static_cast<int>(p), false});
      tp_index[{static_cast<int>(s), static_cast<int>(p), true}] = te;
      tp_index[{static_cast<int>(s), static_cast<int>(p), false}] = tx;
      d.band_partner[te] = tx;
      d.band_partner[tx] = te;
    }
    if (!st.closed) {
      for (int m : {st.from_marked, st.to_marked}) {
        if (m < 0 || m >= Sf.marked_count())
          throw MalformedSpec("arc endpoint outside marked point set");
        if (marked_tp.count(m)) throw MalformedSpec("two arc ends at one marked point");
        marked_tp[m] = add_tp({Sf.marked_slot(m), 0, static_cast<int>(s), -1, false});
      }
    }
  }

  // chords, earliest over
  d.chord_of.assign(d.tps.size(), -1);
  long long layer = 1LL << 40;
  auto add_chord = [&](int a, int b, int strand, int idx) {
    d.chords.push_back({a, b, layer--, strand, idx});
    d.chord_of[a] = d.chord_of[b] = static_cast<int>(d.chords.size() - 1);
  };
  for (size_t s = 0; s < d.strands.size(); ++s) {
    const Strand& st = d.strands[s];
    int L = static_cast<int>(st.word.size());
    if (st.closed) {
      for (int p = 0; p < L; ++p)
        add_chord(tp_index[{(int)s, p, false}], tp_index[{(int)s, (p + 1) % L, true}], (int)s, p);
    } else if (L == 0) {
      add_chord(marked_tp[st.from_marked], marked_tp[st.to_marked], (int)s, 0);
    } else {
      add_chord(marked_tp[st.from_marked], tp_index[{(int)s, 0, true}], (int)s, 0);
      for (int p = 0; p + 1 < L; ++p)
        add_chord(tp_index[{(int)s, p, false}], tp_index[{(int)s, p + 1, true}], (int)s, p + 1);
      add_chord(tp_index[{(int)s, L - 1, false}], marked_tp[st.to_marked], (int)s, L);
    }
  }
  return d;
}

Diagram stack(const Diagram& top, const Diagram& bottom) {
  if (!top.S->same_as(*bottom.S)) throw SurfaceMismatch("stacking across different surfaces");
  Diagram d;
  d.S = top.S;
  d.strands = top.strands;
  for (const auto& st : bottom.strands) d.strands.push_back(st);
  int soff = static_cast<int>(top.strands.size());

  // depth merge: at + ends the upper block sits below (cw of) the lower
  // block; at - ends mirrored. Within each block internal order persists.
  const Surface& S = *top.S;
  std::vector<int> newtop(top.tps.size()), newbot(bottom.tps.size());
  auto depth_shift = [&](const Diagram& other, int slot) {
    int k = 0;
    for (auto& t : other.tps)
      if (t.slot == slot) ++k;
    return k;
  };
  for (size_t i = 0; i < top.tps.size(); ++i) {
    auto t = top.tps[i];
    if (S.is_end_slot(t.slot) && S.slot_sign(t.slot) < 0) t.depth += depth_shift(bottom, t.slot);
    d.tps.push_back(t);
    d.band_partner.push_back(-1);
    newtop[i] = static_cast<int>(d.tps.size() - 1);
  }
  for (size_t i = 0; i < bottom.tps.size(); ++i) {
    auto t = bottom.tps[i];
    if (S.is_end_slot(t.slot) && S.slot_sign(t.slot) > 0) t.depth += depth_shift(top, t.slot);
    t.strand += (t.strand >= 0) ? soff : 0;
    d.tps.push_back(t);
    d.band_partner.push_back(-1);
    newbot[i] = static_cast<int>(d.tps.size() - 1);
  }
  for (size_t i = 0; i < top.tps.size(); ++i)
    if (top.band_partner[i] >= 0) d.band_partner[newtop[i]] = newtop[top.band_partner[i]];
  for (size_t i = 0; i < bottom.tps.size(); ++i)
    if (bottom.band_partner[i] >= 0) d.band_partner[newbot[i]] = newbot[bottom.band_partner[i]];

  d.chord_of.assign(d.tps.size(), -1);
  long long bot_max = 0;
  for (auto& c : bottom.chords) bot_max = std::max(bot_max, c.layer);
  for (auto& c : top.chords) {
    Diagram::Chord nc{newtop[c.t_from], newtop[c.t_to], c.layer + bot_max + 1, c.strand, c.idx};
    d.chords.push_back(nc);
    d.chord_of[nc.t_from] = d.chord_of[nc.t_to] = static_cast<int>(d.chords.size() - 1);
  }
  for (auto& c : bottom.chords) {
    Diagram::Chord nc{newbot[c.t_from], newbot[c.t_to], c.layer, c.strand + soff, c.idx};
    d.chords.push_back(nc);
    d.chord_of[nc.t_from] = d.chord_of[nc.t_to] = static_cast<int>(d.chords.size() - 1);
  }
  // marked-point sanity
  std::set<int> mk;
  for (auto& t : d.tps)
    if (!S.is_end_slot(t.slot) && !mk.insert(t.slot).second)
      throw MalformedSpec("stacked diagrams share a marked point");
  return d;
}

// ---------------------------------------------------------------- geometry

Geom diagram_geometry(const Diagram& d, int seed) {
  // Global ccw order of touchpoints: (slot, depth). Points are exact
  // rationals on the unit circle via the tangent half-angle map; tau
  // strictly increasing keeps them in convex ccw position.
  std::vector<std::pair<std::pair<int, int>, int>> order;
  for (size_t i = 0; i < d.tps.size(); ++i)
    order.push_back({{d.tps[i].slot, d.tps[i].depth}, static_cast<int>(i)});
  std::sort(order.begin(), order.end());
  static const int jitter[16] = {3, 11, 7, 1, 13, 5, 9, 2, 12, 6, 10, 4, 14, 8, 15, 0};
  Geom g;
  g.x.resize(d.tps.size());
  g.y.resize(d.tps.size());
  for (size_t k = 0; k < order.size(); ++k) {
    Rat tau = Rat(static_cast<long>(8 * k + 1)) +
              Rat(jitter[(k + seed * 5) % 16] + seed, 17 + seed);
    Rat t2 = tau * tau;
    g.x[order[k].second] = (1 - t2) / (1 + t2);
    g.y[order[k].second] = 2 * tau / (1 + t2);
  }
  return g;
}

namespace {
Rat cross2(const Rat& ax, const Rat& ay, const Rat& bx, const Rat& by) {
  return ax * by - ay * bx;
}
}  // namespace

std::vector<CrossingInfo> edge_crossings(const Geom& g, const std::vector<EdgeRef>& edges,
                                         bool mirrored) {
  std::vector<Rat> X = g.x, Y = g.y;
  if (mirrored)
    for (auto& y : Y) y = -y;
  auto orient = [&](int p, int q, int r) {
    return cross2(X[q] - X[p], Y[q] - Y[p], X[r] - X[p], Y[r] - Y[p]);
  };
  std::vector<CrossingInfo> out;
  for (size_t i = 0; i < edges.size(); ++i) {
    for (size_t j = i + 1; j < edges.size(); ++j) {
      const EdgeRef &a = edges[i], &b = edges[j];
      if (a.t1 == b.t1 || a.t1 == b.t2 || a.t2 == b.t1 || a.t2 == b.t2) continue;
      Rat o1 = orient(a.t1, a.t2, b.t1), o2 = orient(a.t1, a.t2, b.t2);
      Rat o3 = orient(b.t1, b.t2, a.t1), o4 = orient(b.t1, b.t2, a.t2);
      if (o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0) throw DegenerateGeometry{};
      if ((o1 > 0) == (o2 > 0) || (o3 > 0) == (o4 > 0)) continue;
      if (a.layer == b.layer) throw SkeinError("crossing between equal layers");
      const EdgeRef& over = a.layer > b.layer ? a : b;
      const EdgeRef& under = a.layer > b.layer ? b : a;
      // intersection point and parameters
      Rat dax = X[over.t2] - X[over.t1], day = Y[over.t2] - Y[over.t1];
      Rat dbx = X[under.t2] - X[under.t1], dby = Y[under.t2] - Y[under.t1];
      Rat den = cross2(dax, day, dbx, dby);
      Rat t_over = cross2(X[under.t1] - X[over.t1], Y[under.t1] - Y[over.t1], dbx, dby) / den;
      Rat t_under = cross2(X[under.t1] - X[over.t1], Y[under.t1] - Y[over.t1], dax, day) / den;
      Rat px = X[over.t1] + dax * t_over, py = Y[over.t1] + day * t_over;
      CrossingInfo ci;
      ci.over_edge = over.id;
      ci.under_edge = under.id;
      ci.param_over = t_over;
      ci.param_under = t_under;
      Rat s = cross2(dax, day, dbx, dby);
      ci.sign = s > 0 ? 1 : -1;
      // four ports sorted ccw around the point
      struct Port {
        Rat vx, vy;
        std::pair<int, int> ref;
      };
      std::array<Port, 4> ports = {
          Port{X[over.t1] - px, Y[over.t1] - py, {over.id, 0}},
          Port{X[over.t2] - px, Y[over.t2] - py, {over.id, 1}},
          Port{X[under.t1] - px, Y[under.t1] - py, {under.id, 0}},
          Port{X[under.t2] - px, Y[under.t2] - py, {under.id, 1}},
      };
      auto half = [](const Port& p) { return (p.vy > 0 || (p.vy == 0 && p.vx > 0)) ? 0 : 1; };
      std::sort(ports.begin(), ports.end(), [&](const Port& p, const Port& q) {
        int hp = half(p), hq = half(q);
        if (hp != hq) return hp < hq;
        Rat c = cross2(p.vx, p.vy, q.vx, q.vy);
        if (c == 0) throw DegenerateGeometry{};
        return c > 0;
      });
      for (int k = 0; k < 4; ++k) ci.ccw_ports[k] = ports[k].ref;
      out.push_back(std::move(ci));
    }
  }
  return out;
}

std::vector<CrossingInfo> diagram_crossings(const Diagram& d) {
  std::vector<EdgeRef> edges;
  for (size_t c = 0; c < d.chords.size(); ++c)
    edges.push_back({d.chords[c].t_from, d.chords[c].t_to, d.chords[c].layer,
                     static_cast<int>(c)});
  for (int seed = 0; seed < 12; ++seed) {
    try {
      return edge_crossings(diagram_geometry(d, seed), edges, false);
    } catch (const DegenerateGeometry&) {
      continue;
    }
  }
  throw SkeinError("degenerate drawing geometry at all seeds");
}

int crossing_count(const Diagram& d) { return static_cast<int>(diagram_crossings(d).size()); }

int writhe(const Diagram& d) {
  int w = 0;
  for (const auto& ci : diagram_crossings(d)) w += ci.sign;
  return w;
}

// -------------------------------------------------------------- multicurves

Multicurve Multicurve::empty(SurfacePtr S) {
  Multicurve m;
  m.S = S;
  return m;
}

Multicurve Multicurve::single(SurfacePtr S, const Word& w) {
  Word r = cyclic_reduce(w);
  if (r.empty()) throw SkeinError("trivial word is not a multicurve component");
  Multicurve m;
  m.S = S;
  m.loops[loop_key(*S, r)] = 1;
  return m;
}

int Multicurve::component_count() const {
  int k = 0;
  for (auto& [w, m] : loops) k += m;
  return k;
}

Multicurve Multicurve::with_added(const Word& w) const {
  Multicurve m = *this;
  Word r = cyclic_reduce(w);
  if (r.empty()) throw SkeinError("trivial word is not a multicurve component");
  m.loops[loop_key(*S, r)] += 1;
  return m;
}

std::string Multicurve::key() const {
  std::string s;
  for (auto& [w, m] : loops) {
    for (int i = 0; i < m; ++i) {
      if (!s.empty()) s += " | ";
      s += w;
    }
  }
  return s.empty() ? "(empty)" : s;
}

Diagram Multicurve::drawing(DepthPolicy policy) const {
  std::vector<Strand> strands;
  for (auto& [key, mult] : loops) {
    Word w = S->word_from_string(key);
    if (policy == DepthPolicy::CanonicalVariant && w.size() > 1)
      std::rotate(w.begin(), w.begin() + 1, w.end());
    for (int i = 0; i < mult; ++i) {
      Strand st;
      st.closed = true;
      st.word = w;
      st.copy_index = i;
      strands.push_back(st);
    }
  }
  Diagram d = draw_strands(S, std::move(strands), policy);
  if (policy != DepthPolicy::Naive && crossing_count(d) != 0)
    throw NotEmbeddable("multicurve {" + key() + "} is not drawable crossingless");
  return d;
}

Multicurve band_core(SurfacePtr S, int band) {
  return Multicurve::single(S, Word{{band, 1}});
}

Multicurve boundary_parallel(SurfacePtr S, int component) {
  const auto& bw = S->boundary_words();
  if (component < 0 || component >= static_cast<int>(bw.size()))
    throw MalformedSpec("no boundary component " + std::to_string(component));
  if (bw[component].empty()) throw SkeinError("boundary of the disk is trivial in the disk");
  return Multicurve::single(S, bw[component]);
}

Multicurve curve_from_word(SurfacePtr S, const Word& w) {
  Multicurve m = Multicurve::single(S, w);  // throws on trivial
  m.drawing(DepthPolicy::Canonical);        // throws NotEmbeddable
  return m;
}

Multicurve OrientedCurve::as_multicurve() const { return Multicurve::single(S, word); }

int intersection_mu(const OrientedCurve& c, const OrientedCurve& d) {
  Diagram top = draw_strands(c.S, {Strand{true, c.word, -1, -1, 0}}, DepthPolicy::Canonical);
  Diagram bot = draw_strands(d.S, {Strand{true, d.word, -1, -1, 0}}, DepthPolicy::Canonical);
  Diagram st = stack(top, bot);
  int mu = 0;
  for (const auto& ci : diagram_crossings(st)) mu += ci.sign;
  return mu;
}

bool drawn_disjoint(const OrientedCurve& c, const OrientedCurve& d) {
  if (loop_key(*c.S, c.word) == loop_key(*d.S, d.word)) return true;  // parallel copies
  Multicurve m = Multicurve::single(c.S, c.word);
  Word rd = cyclic_reduce(d.word);
  m.loops[loop_key(*c.S, rd)] += 1;
  try {
    m.drawing(DepthPolicy::Canonical);
    return true;
  } catch (const NotEmbeddable&) {
    return false;
  }
}

Rat mu_form(const Surface& S, const HClass& a, const HClass& b) {
  // symplectic pairing of band core classes, computed once per surface
  static std::map<std::string, std::vector<std::vector<int>>> cache;
  auto it = cache.find(S.spec_string());
  if (it == cache.end()) {
    int n = S.num_bands();
    std::vector<std::vector<int>> M(n, std::vector<int>(n, 0));
    std::vector<std::string> ends;
    for (int s = 0; s < S.num_end_slots(); ++s)
      ends.push_back(S.band_name(S.slot_band(s)) + (S.slot_sign(s) > 0 ? "+" : "-"));
    SurfacePtr sp = make_surface(ends, S.marked_count());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        M[i][j] = intersection_mu(OrientedCurve{sp, {{i, 1}}}, OrientedCurve{sp, {{j, 1}}});
      }
    it = cache.emplace(S.spec_string(), std::move(M)).first;
  }
  Rat v = 0;
  int n = S.num_bands();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (it->second[i][j] != 0) v += a.v[i] * b.v[j] * it->second[i][j];
  return v;
}

// --------------------------------------------------------------- dehn twist

Word dehn_twist_word(const OrientedCurve& c, const Word& target, bool target_closed, int k,
                     int target_from_marked, int target_to_marked) {
  if (k == 0) return target;
  Word tw = target_closed ? cyclic_reduce(target) : reduce_word(target);
  Word cw = cyclic_reduce(c.word);
  if (cw.empty()) throw SkeinError("cannot twist along a trivial curve");
  if (tw.empty() && target_closed) throw SkeinError("cannot twist a trivial loop");

  Diagram top = draw_strands(c.S, {Strand{true, cw, -1, -1, 0}}, DepthPolicy::Canonical);
  Strand tgt;
  tgt.closed = target_closed;
  tgt.word = tw;
  tgt.from_marked = target_from_marked;
  tgt.to_marked = target_to_marked;
  Diagram bot = draw_strands(c.S, {tgt}, DepthPolicy::Canonical);
  Diagram st = stack(top, bot);
  int nctop = static_cast<int>(top.chords.size());

  // crossings of target chords with c chords, sorted along each target chord
  struct Ins {
    int chord_idx;  // target-strand chord index (word position of insertion)
    Rat param;
    int c_chord;  // chord index within c's cycle
    int sign;
  };
  std::vector<Ins> ins;
  for (const auto& ci : diagram_crossings(st)) {
    int co = ci.over_edge, cu = ci.under_edge;
    bool over_is_c = co < nctop;
    bool under_is_c = cu < nctop;
    if (over_is_c == under_is_c) continue;  // self-crossings cannot occur here
    int cchord = over_is_c ? co : cu;
    int tchord = over_is_c ? cu : co;
    Rat param = over_is_c ? ci.param_under : ci.param_over;
    // sign of (dir_c, dir_target): ci.sign is sign(dir_over, dir_under)
    int s = over_is_c ? ci.sign : -ci.sign;
    ins.push_back({st.chords[tchord].idx, param, st.chords[cchord].idx, s});
  }
  std::sort(ins.begin(), ins.end(), [](const Ins& a, const Ins& b) {
    if (a.chord_idx != b.chord_idx) return a.chord_idx < b.chord_idx;
    return a.param < b.param;
  });

  int L = static_cast<int>(cw.size());
  auto cycle_from = [&](int j, int dir) {
    // one full copy of c starting just past chord j
    Word w;
    if (dir > 0)
      for (int i = 1; i <= L; ++i) w.push_back(cw[(j + i) % L]);
    else
      for (int i = 0; i < L; ++i) w.push_back({cw[(j - i + L) % L].band, -cw[(j - i + L) % L].sign});
    return w;
  };

  // insertion position in the target word for a crossing on target chord idx:
  // closed: chord j joins letters j and j+1 -> insert at j+1; open: chord j
  // sits before letter j.
  Word out;
  int Lt = static_cast<int>(tw.size());
  size_t ii = 0;
  auto emit_insertions_at = [&](int pos) {
    while (ii < ins.size()) {
      int ipos = target_closed ? (ins[ii].chord_idx + 1) % (Lt == 0 ? 1 : Lt) : ins[ii].chord_idx;
      if (target_closed && ins[ii].chord_idx == Lt - 1) ipos = Lt;  // wrap chord: after last letter
      if (ipos != pos) break;
      int dir = (k > 0) ? ins[ii].sign : -ins[ii].sign;
      for (int rep = 0; rep < std::abs(k); ++rep) {
        Word cyc = cycle_from(ins[ii].c_chord, dir);
        out.insert(out.end(), cyc.begin(), cyc.end());
      }
      ++ii;
    }
  };
  for (int p = 0; p <= Lt; ++p) {
    emit_insertions_at(p);
    if (p < Lt) out.push_back(tw[p]);
  }
  if (ii != ins.size()) throw SkeinError("internal: unconsumed twist insertions");
  return target_closed ? cyclic_reduce(out) : reduce_word(out);
}

Multicurve dehn_twist(const OrientedCurve& c, const Multicurve& d, int k) {
  Multicurve out = Multicurve::empty(d.S);
  for (auto& [key, mult] : d.loops) {
    Word w = d.S->word_from_string(key);
    Word t = dehn_twist_word(c, w, true, k);
    out.loops[loop_key(*d.S, t)] += mult;
  }
  if (!out.is_empty()) out.drawing();  // assert embeddable
  return out;
}

OrientedCurve dehn_twist(const OrientedCurve& c, const OrientedCurve& d, int k) {
  OrientedCurve r{d.S, dehn_twist_word(c, d.word, true, k)};
  r.as_multicurve().drawing();
  return r;
}

// ------------------------------------------------------------ cut components

int cut_component_count(const OrientedCurve& c) {
  Diagram d = c.as_multicurve().drawing();
  const Surface& S = *c.S;
  int T = static_cast<int>(d.tps.size());
  // positions in boundary order
  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::pair(d.tps[a].slot, d.tps[a].depth) < std::pair(d.tps[b].slot, d.tps[b].depth);
  });
  std::vector<int> pos_of(T);
  for (int p = 0; p < T; ++p) pos_of[order[p]] = p;

  // faces by parenthesis nesting of the (non-crossing) chords; face of gap p
  // = region just ccw of boundary position p
  std::vector<int> face_of_gap(T, 0);
  std::vector<int> stackv = {0};
  int next_face = 1;
  std::vector<int> open(d.chords.size(), 0);
  for (int p = 0; p < T; ++p) {
    int tp = order[p];
    int ch = d.chord_of[tp];
    if (!open[ch]) {
      open[ch] = 1;
      stackv.push_back(next_face++);
    } else {
      stackv.pop_back();
    }
    face_of_gap[p] = stackv.back();
  }

  // union faces across band strips
  std::vector<int> uf(next_face);
  std::iota(uf.begin(), uf.end(), 0);
  std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
  auto unite = [&](int a, int b) { uf[find(a)] = find(b); };

  auto gap_before = [&](int slot, int depth) {
    // gap just cw of boundary point (slot, depth): the face of gap p-1 where
    // p is the position of (slot,depth); if no tp there, the covering gap.
    int lo = 0, hi = T;  // first position with (slot,depth) >= target
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      auto key = std::pair(d.tps[order[mid]].slot, d.tps[order[mid]].depth);
      if (key < std::pair(slot, depth))
        lo = mid + 1;
      else
        hi = mid;
    }
    return face_of_gap[(lo - 1 + T) % T];
  };

  for (int g = 0; g < S.num_bands(); ++g) {
    int K = d.strands_through(g);
    int sp = S.end_slot(g, 1), sm = S.end_slot(g, -1);
    for (int dd = 0; dd <= K; ++dd) {
      // strip between strand depths dd-1 and dd at the + end pairs with the
      // strip between mirrored depths at the - end
      int fplus = gap_before(sp, dd);
      int fminus = gap_before(sm, K - dd);
      unite(fplus, fminus);
    }
  }
  std::set<int> comps;
  for (int p = 0; p < T; ++p) comps.insert(find(face_of_gap[p]));
  // faces not adjacent to the boundary (enclosed by the curve alone) still
  // belong to some component; they are merged through band strips or are
  // interior pockets: collect every face id reachable in face_of_gap plus
  // strip-united ones. Interior faces without any gap cannot exist for
  // chords with endpoints on the boundary.
  return static_cast<int>(comps.size());
}

}  // namespace skf
