#ifndef FUTMC_ACTION_HPP
#define FUTMC_ACTION_HPP

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

namespace futmc {

using Val = std::int64_t;

enum class ActKind { Read, Write, Update, Silent };

enum class Mode { Rlx, Rel, Acq, RelAcq };

inline const char* mode_str(Mode m) {
  switch (m) {
    case Mode::Rlx: return "rlx";
    case Mode::Rel: return "rel";
    case Mode::Acq: return "acq";
    case Mode::RelAcq: return "ra";
  }
  return "?";
}

inline const char* kind_str(ActKind k) {
  switch (k) {
    case ActKind::Read: return "R";
    case ActKind::Write: return "W";
    case ActKind::Update: return "U";
    case ActKind::Silent: return "A";
  }
  return "?";
}

/// A memory action: R i x v / W i x v / U i x m n, plus the silent action
/// of a register assignment (line only, no variable or values).
/// `line` is the source label, carried so futures can be consumed by label.
struct Action {
  ActKind kind = ActKind::Silent;
  std::string line;
  std::string var;
  Val rval = 0;  // value read (Read, Update)
  Val wval = 0;  // value written (Write, Update)
  Mode mode = Mode::Rlx;

  static Action read(std::string line, std::string var, Val v, bool acq = false) {
    return {ActKind::Read, std::move(line), std::move(var), v, 0, acq ? Mode::Acq : Mode::Rlx};
  }
  static Action write(std::string line, std::string var, Val v, bool rel = false) {
    return {ActKind::Write, std::move(line), std::move(var), 0, v, rel ? Mode::Rel : Mode::Rlx};
  }
  static Action update(std::string line, std::string var, Val m, Val n) {
    return {ActKind::Update, std::move(line), std::move(var), m, n, Mode::RelAcq};
  }
  static Action silent(std::string line) {
    return {ActKind::Silent, std::move(line), "", 0, 0, Mode::Rlx};
  }

  bool is_read() const { return kind == ActKind::Read || kind == ActKind::Update; }
  bool is_write() const { return kind == ActKind::Write || kind == ActKind::Update; }
  bool releasing() const { return mode == Mode::Rel || mode == Mode::RelAcq; }
  bool acquiring() const { return mode == Mode::Acq || mode == Mode::RelAcq; }

  Val read_value() const { return rval; }
  Val written_value() const { return wval; }

  auto key() const { return std::tie(kind, line, var, rval, wval, mode); }
  bool operator==(const Action& o) const { return key() == o.key(); }
  bool operator!=(const Action& o) const { return !(*this == o); }
  bool operator<(const Action& o) const { return key() < o.key(); }

  std::string str() const {
    std::ostringstream os;
    os << kind_str(kind) << ' ' << line;
    if (kind != ActKind::Silent) {
      os << ' ' << var;
      if (kind == ActKind::Read) os << ' ' << rval;
      if (kind == ActKind::Write) os << ' ' << wval;
      if (kind == ActKind::Update) os << ' ' << rval << ' ' << wval;
      if (mode != Mode::Rlx && mode != Mode::RelAcq) os << ' ' << mode_str(mode);
    }
    return os.str();
  }
};

}  // namespace futmc

#endif
