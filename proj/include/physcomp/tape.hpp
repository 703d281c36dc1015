#pragma once

// Bi-infinite Turing tapes with finitely many non-blank cells.

#include <cstddef>
#include <deque>
#include <string>

#include "physcomp/errors.hpp"

namespace physcomp {

using Symbol = char;
inline constexpr Symbol kBlank = '_';

/// Cells ..., -2, -1 | 0 | 1, 2, ...  The head always reads cell 0.
///
/// left[i] holds cell -(i+1), right[i] holds cell i+1.  Blanks at the far
/// ends are trimmed so equal tapes compare equal.
class TapeConfig {
public:
    TapeConfig() = default;

    Symbol read() const { return head_; }
    void write(Symbol s) {
        head_ = s;
        normalize();
    }

    /// Cell i+1 becomes cell i.
    void shift_left() {
        left_.push_front(head_);
        if (right_.empty()) {
            head_ = kBlank;
        } else {
            head_ = right_.front();
            right_.pop_front();
        }
        normalize();
    }

    /// Cell i-1 becomes cell i.
    void shift_right() {
        right_.push_front(head_);
        if (left_.empty()) {
            head_ = kBlank;
        } else {
            head_ = left_.front();
            left_.pop_front();
        }
        normalize();
    }

    Symbol at(long cell) const {
        if (cell == 0) {
            return head_;
        }
        if (cell > 0) {
            const auto i = static_cast<std::size_t>(cell - 1);
            return i < right_.size() ? right_[i] : kBlank;
        }
        const auto i = static_cast<std::size_t>(-cell - 1);
        return i < left_.size() ? left_[i] : kBlank;
    }

    long min_cell() const { return -static_cast<long>(left_.size()); }
    long max_cell() const { return static_cast<long>(right_.size()); }

    bool all_blank() const { return head_ == kBlank && left_.empty() && right_.empty(); }

    /// Non-blank run starting at cell 1.
    std::string word_right_of_head() const {
        std::string out;
        for (Symbol s : right_) {
            if (s == kBlank) {
                break;
            }
            out.push_back(s);
        }
        return out;
    }

    /// Cells from the leftmost to the rightmost non-blank cell; empty when
    /// the tape is blank.
    std::string written() const {
        long lo = min_cell();
        long hi = max_cell();
        while (lo <= hi && at(lo) == kBlank) {
            ++lo;
        }
        while (hi >= lo && at(hi) == kBlank) {
            --hi;
        }
        std::string out;
        for (long c = lo; c <= hi; ++c) {
            out.push_back(at(c));
        }
        return out;
    }

    /// 2r+1 cells centred on the head, head cell bracketed.
    std::string window(long radius = 16) const {
        std::string out;
        for (long c = -radius; c <= radius; ++c) {
            if (c == 0) {
                out.push_back('[');
            }
            out.push_back(at(c));
            if (c == 0) {
                out.push_back(']');
            }
        }
        return out;
    }

    /// Compact form "left[head]right" over the non-blank span.
    std::string content() const {
        std::string out;
        for (auto it = left_.rbegin(); it != left_.rend(); ++it) {
            out.push_back(*it);
        }
        out.push_back('[');
        out.push_back(head_);
        out.push_back(']');
        out.append(right_.begin(), right_.end());
        return out;
    }

    friend bool operator==(const TapeConfig& a, const TapeConfig& b) {
        return a.head_ == b.head_ && a.left_ == b.left_ && a.right_ == b.right_;
    }

private:
    void normalize() {
        while (!left_.empty() && left_.back() == kBlank) {
            left_.pop_back();
        }
        while (!right_.empty() && right_.back() == kBlank) {
            right_.pop_back();
        }
    }

    std::deque<Symbol> left_;
    Symbol head_ = kBlank;
    std::deque<Symbol> right_;
};

struct TapeOp {
    enum class Kind { Identity, ShiftLeft, ShiftRight, Write };
    Kind kind = Kind::Identity;
    Symbol symbol = kBlank;

    static TapeOp identity() { return {Kind::Identity, kBlank}; }
    static TapeOp left() { return {Kind::ShiftLeft, kBlank}; }
    static TapeOp right() { return {Kind::ShiftRight, kBlank}; }
    static TapeOp write(Symbol s) { return {Kind::Write, s}; }

    friend bool operator==(const TapeOp& a, const TapeOp& b) {
        return a.kind == b.kind && (a.kind != Kind::Write || a.symbol == b.symbol);
    }
};

inline std::string to_string(const TapeOp& op) {
    switch (op.kind) {
        case TapeOp::Kind::Identity: return "id";
        case TapeOp::Kind::ShiftLeft: return "left";
        case TapeOp::Kind::ShiftRight: return "right";
        case TapeOp::Kind::Write: return std::string("write '") + op.symbol + "'";
    }
    return "?";
}

inline TapeConfig apply_tape_op(const TapeOp& op, TapeConfig t) {
    switch (op.kind) {
        case TapeOp::Kind::Identity: break;
        case TapeOp::Kind::ShiftLeft: t.shift_left(); break;
        case TapeOp::Kind::ShiftRight: t.shift_right(); break;
        case TapeOp::Kind::Write: t.write(op.symbol); break;
    }
    return t;
}

/// Word at cells 0..|w|-1 with the head on cell 0.
inline TapeConfig encode_input(const std::string& w, const std::string& alphabet) {
    for (Symbol s : w) {
        if (alphabet.find(s) == std::string::npos) {
            throw SymbolOutsideAlphabet(std::string("'") + s + "' not in \"" + alphabet + "\"");
        }
    }
    TapeConfig t;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        t.shift_right();
        t.write(*it);
    }
    return t;
}

}  // namespace physcomp
