#pragma once

// The disk-with-bands surface model: curve words, canonical embedded
// drawings, Dehn twists on drawings, homology and intersection data.
//
// A surface is a disk with n untwisted bands attached along 2n disjoint
// arcs ("slots") of the disk boundary, one "+" and one "-" end per band,
// in a prescribed cyclic order. pi_1 is free on the band generators; free
// homotopy classes of loops are reduced cyclic words. Marked points (the
// base point set J) sit on the boundary gap before slot 0.
//
// Drawings place every strand as a sequence of band traversals joined by
// straight chords between exact rational points on the disk boundary;
// crossings are genuine segment intersections computed exactly.

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "skeinforge/coeff.hpp"
#include "skeinforge/errors.hpp"

namespace skf {

struct Letter {
  int band = 0;
  int sign = 1;  // +1 or -1
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};
using Word = std::vector<Letter>;

Word inverse_word(const Word& w);
Word reduce_word(Word w);         // free reduction
Word cyclic_reduce(Word w);       // reduce + strip matching head/tail
Word concat(const Word& a, const Word& b);

class Surface;
using SurfacePtr = std::shared_ptr<const Surface>;

class Surface {
 public:
  int num_bands() const { return static_cast<int>(names_.size()); }
  int marked_count() const { return marked_; }
  const std::string& band_name(int b) const { return names_[b]; }
  int band_index(const std::string& name) const;  // throws UnknownBand

  // Slots 0..2n-1 are band ends in the given cyclic (ccw) order, then one
  // slot per marked point.
  int num_end_slots() const { return 2 * num_bands(); }
  int num_slots() const { return num_end_slots() + marked_; }
  int marked_slot(int i) const { return num_end_slots() + i; }
  bool is_end_slot(int s) const { return s < num_end_slots(); }
  int slot_band(int s) const { return slot_band_[s]; }
  int slot_sign(int s) const { return slot_sign_[s]; }  // +1 for a "+" end
  int end_slot(int band, int sign) const { return end_slot_[band][sign > 0 ? 0 : 1]; }
  int partner_slot(int s) const { return end_slot(slot_band(s), -slot_sign(s)); }

  int euler_characteristic() const { return 1 - num_bands(); }
  int genus() const { return genus_; }
  int boundary_count() const { return boundary_; }
  /// One reduced word per boundary component (class of the parallel curve).
  const std::vector<Word>& boundary_words() const { return bwords_; }

  const std::string& spec_string() const { return spec_; }
  bool same_as(const Surface& o) const { return spec_ == o.spec_; }

  Word word_from_string(const std::string& s) const;
  std::string word_to_string(const Word& w) const;
  std::string letter_to_string(const Letter& l) const;

  friend SurfacePtr make_surface(const std::vector<std::string>& ends, int marked);
  friend SurfacePtr with_marked(const SurfacePtr& s, int marked);

 private:
  std::vector<std::string> names_;
  std::vector<int> slot_band_, slot_sign_;
  int end_slot_[64][2] = {};
  int marked_ = 0;
  int genus_ = 0, boundary_ = 0;
  std::vector<Word> bwords_;
  std::string spec_;
  void finish();
};

/// ends like {"a+","b+","a-","b-"}; each band needs exactly one "+" and one
/// "-" end. Throws MalformedSpec.
SurfacePtr make_surface(const std::vector<std::string>& ends, int marked);
SurfacePtr with_marked(const SurfacePtr& s, int marked);

/// Canonical representative of the unoriented free-homotopy class:
/// lexicographically least rotation among all rotations of w and inverse(w).
Word canonical_loop(const Word& cyclically_reduced);
std::string loop_key(const Surface& S, const Word& w);

struct HClass {
  std::vector<Rat> v;
  HClass() = default;
  explicit HClass(int n) : v(n, Rat(0)) {}
  bool is_zero() const;
  HClass operator+(const HClass&) const;
  HClass operator-(const HClass&) const;
  HClass operator*(const Rat&) const;
  friend bool operator==(const HClass&, const HClass&) = default;
};
HClass homology_class(const Surface& S, const Word& w);
/// Algebraic intersection form on H (symplectic pairing of band classes).
Rat mu_form(const Surface& S, const HClass& a, const HClass& b);

// ------------------------------------------------------------------ drawings

enum class DepthPolicy { Canonical, CanonicalVariant, Naive };

struct Strand {
  bool closed = true;
  Word word;
  int from_marked = -1, to_marked = -1;  // for open strands
  int copy_index = 0;
};

/// A concrete planar drawing: touchpoints on the boundary, chords in the
/// disk, parallel strands in the bands. "depth" counts positions within a
/// slot in ccw order; a traversal at depth d on one end sits at depth
/// K-1-d on the other (K strands through the band), which is exactly the
/// plane geometry of an untwisted band.
class Diagram {
 public:
  SurfacePtr S;
  std::vector<Strand> strands;

  struct TP {
    int slot = 0, depth = 0;
    int strand = -1, pos = -1;  // traversal index in strand word; -1 for marked endpoint
    bool entry = false;         // strand runs disk->band here
  };
  std::vector<TP> tps;
  std::vector<int> band_partner;  // tp -> tp across the band, -1 at marked points

  struct Chord {
    int t_from = -1, t_to = -1;  // along the strand direction
    long long layer = 0;         // larger = over
    int strand = -1, idx = -1;
  };
  std::vector<Chord> chords;
  std::vector<int> chord_of;  // tp -> chord index

  int tp_at(int slot, int depth) const;  // -1 if absent
  int strands_through(int band) const;
  std::string dump() const;  // debugging aid
};

/// Build a drawing. Canonical policy yields the forced embedded order
/// (crossingless iff the strand system is disjointly realizable); Naive
/// allocates depths in traversal order and is used for drawn
/// representatives of non-simple words.
Diagram draw_strands(SurfacePtr S, std::vector<Strand> strands, DepthPolicy policy);

/// Stack `top` over `bottom` (same surface): depths merged, top layers above.
Diagram stack(const Diagram& top, const Diagram& bottom);

// Exact geometry: touchpoints become rational points on the unit circle in
// global ccw order.
struct Geom {
  std::vector<Rat> x, y;
};
Geom diagram_geometry(const Diagram& d, int seed);

struct EdgeRef {
  int t1 = -1, t2 = -1;
  long long layer = 0;
  int id = -1;
};

struct CrossingInfo {
  int over_edge = -1, under_edge = -1;           // EdgeRef ids
  std::array<std::pair<int, int>, 4> ccw_ports;  // (edge id, end) ccw around the point; end 0 = toward t1
  Rat param_over, param_under;                   // position along each edge, from t1
  int sign = 0;                                  // orientation of (dir_over, dir_under), dirs t1->t2
};

/// All pairwise intersections among the listed straight edges. `mirrored`
/// computes in the orientation-reversed disk (used for band strips routed
/// outside the disk boundary). Throws on degenerate geometry; callers retry
/// with a different seed.
std::vector<CrossingInfo> edge_crossings(const Geom& g, const std::vector<EdgeRef>& edges,
                                         bool mirrored);

/// Crossings of the diagram's chords (ids = chord indices); retries seeds
/// internally on degeneracy.
std::vector<CrossingInfo> diagram_crossings(const Diagram& d);

int crossing_count(const Diagram& d);

/// Writhe of an oriented diagram: sum of crossing signs.
int writhe(const Diagram& d);

// ---------------------------------------------------------------- multicurves

/// A multiset of disjoint unoriented nontrivial loop classes; the skein
/// basis element it labels. Oriented per-component words are retained for
/// homology/twisting.
class Multicurve {
 public:
  SurfacePtr S;
  std::map<std::string, int> loops;  // canonical loop key -> multiplicity

  static Multicurve empty(SurfacePtr S);
  static Multicurve single(SurfacePtr S, const Word& w);  // w nontrivial after cyclic reduction
  bool is_empty() const { return loops.empty(); }
  int component_count() const;
  Multicurve with_added(const Word& w) const;
  std::string key() const;
  friend bool operator==(const Multicurve&, const Multicurve&) = default;

  /// Canonical embedded drawing; throws NotEmbeddable if the class multiset
  /// is not disjointly realizable as drawn by the forced-order rule.
  Diagram drawing(DepthPolicy policy = DepthPolicy::Canonical) const;
};

/// kind helpers (constructive curves)
Multicurve band_core(SurfacePtr S, int band);
Multicurve boundary_parallel(SurfacePtr S, int component);
/// Accepts an arbitrary word; NotEmbeddable when it is not drawable
/// crossingless (non-simple class).
Multicurve curve_from_word(SurfacePtr S, const Word& w);

/// Oriented single curve with a retained word (for mu / twisting / homology).
struct OrientedCurve {
  SurfacePtr S;
  Word word;  // cyclically reduced, nonempty
  Multicurve as_multicurve() const;
};

/// Signed crossing count of the stacked canonical drawings (algebraic
/// intersection number of the classes).
int intersection_mu(const OrientedCurve& c, const OrientedCurve& d);

/// Geometric disjointness as drawn: the canonical joint drawing has no
/// crossings. (Sufficient for disjointness; the forced-order drawing of a
/// realizable system is crossingless.)
bool drawn_disjoint(const OrientedCurve& c, const OrientedCurve& d);

/// Right-handed Dehn twist along c applied to a word (loop or arc word);
/// power k. Implemented by crossing-indexed insertion of c's cycle.
Word dehn_twist_word(const OrientedCurve& c, const Word& target, bool target_closed, int k,
                     int target_from_marked = -1, int target_to_marked = -1);

Multicurve dehn_twist(const OrientedCurve& c, const Multicurve& d, int k);
OrientedCurve dehn_twist(const OrientedCurve& c, const OrientedCurve& d, int k);

/// Number of connected components of the surface cut along the (single,
/// embedded) curve. 2 means separating.
int cut_component_count(const OrientedCurve& c);

}  // namespace skf
