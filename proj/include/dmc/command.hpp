#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dmc/sexpr.hpp"

namespace dmc {

// A qubit name: a concrete non-negative integer reference, or a
// "?"-prefixed variable (stored with the "?").
using QName = std::variant<std::int64_t, std::string>;

inline bool is_concrete(const QName& q) { return q.index() == 0; }
inline std::int64_t qref(const QName& q) { return std::get<std::int64_t>(q); }
std::string qname_str(const QName& q);
QName qn(std::int64_t v);
QName qn(std::string v);

// Signal expressions evaluate to a bit in {0,1}.
struct SignalExpr {
  enum class Kind { Const, Outcome, Input, Sum };
  Kind kind = Kind::Const;
  int value = 0;                  // Const
  QName qubit;                    // Outcome: (s q)
  std::string input;              // Input: bare classical-input name
  std::vector<SignalExpr> terms;  // Sum: (+ t1 t2 ...), XOR

  static SignalExpr constant(int bit);
  static SignalExpr outcome(QName q);
  static SignalExpr input_ref(std::string name);
  static SignalExpr sum(std::vector<SignalExpr> ts);
  bool operator==(const SignalExpr& o) const;
};

// Angles are radians normalized to [0, 2*pi); a pattern parameter may stand
// in for a literal (bare identifier in angle position).
struct Angle {
  double value = 0.0;
  std::string param;  // nonempty: symbolic parameter, `value` unused
  bool symbolic() const { return !param.empty(); }
  bool operator==(const Angle& o) const {
    return param == o.param && (symbolic() || value == o.value);
  }
};

double normalize_angle(double radians);  // into [0, 2*pi)

struct Command {
  enum class Op {
    Entangle,  // (E q1 q2)
    Measure,   // (M q angle [s [t]])
    CorrectX,  // (X q [sig])
    CorrectZ,  // (Z q [sig])
    Send,      // (send ch sig)
    Recv,      // (recv ch name)
    QSend,     // (qsend ch q)
    QRecv,     // (qrecv ch q)
  };

  Op op = Op::Entangle;
  QName q1 = std::int64_t{0};  // E: first; M/X/Z: target; QSend/QRecv: qubit
  QName q2 = std::int64_t{0};  // E: second
  Angle angle;                 // M
  std::optional<SignalExpr> sig1;  // M: s (angle sign); X/Z: condition; Send: payload
  std::optional<SignalExpr> sig2;  // M: t (pi offset)
  std::string channel;             // send/recv/qsend/qrecv
  std::string binding;             // recv: bound classical-input name

  bool quantum() const {
    return op == Op::Entangle || op == Op::Measure || op == Op::CorrectX ||
           op == Op::CorrectZ;
  }
  bool communication() const { return !quantum(); }
  bool operator==(const Command& o) const;
};

// --- construction helpers (used by the protocol library and tests) ---
Command cmd_e(QName a, QName b);
Command cmd_m(QName q, Angle angle, std::optional<SignalExpr> s = {},
              std::optional<SignalExpr> t = {});
Command cmd_x(QName q, std::optional<SignalExpr> sig = {});
Command cmd_z(QName q, std::optional<SignalExpr> sig = {});
Command cmd_send(std::string ch, SignalExpr sig);
Command cmd_recv(std::string ch, std::string name);
Command cmd_qsend(std::string ch, QName q);
Command cmd_qrecv(std::string ch, QName q);

// --- conversion to/from s-expressions ---
struct CommandParseOptions {
  bool allow_distributed = false;  // accept send/recv/qsend/qrecv
  bool allow_params = false;       // accept bare identifiers in angle position
  std::vector<std::string>* warnings = nullptr;  // e.g. the Y-substitution note
};

QName parse_qname(const SExpr& e);
SignalExpr parse_signal(const SExpr& e);
Angle parse_angle(const SExpr& e, const CommandParseOptions& opts);
Command parse_command(const SExpr& e, const CommandParseOptions& opts = {});
std::vector<Command> parse_command_sequence(const SExpr& list,
                                            const CommandParseOptions& opts = {});

SExpr qname_to_sexpr(const QName& q);
SExpr signal_to_sexpr(const SignalExpr& s);
SExpr angle_to_sexpr(const Angle& a);
SExpr command_to_sexpr(const Command& c);
SExpr command_sequence_to_sexpr(const std::vector<Command>& cs);

// Render a double so that parsing the result returns the same double.
std::string format_double_exact(double v);

}  // namespace dmc
