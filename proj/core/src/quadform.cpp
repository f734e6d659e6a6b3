#include "msiforge/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "msiforge/util.hpp"

namespace msiforge::quad {

Discriminant::Discriminant(long long value) : value_(value) {
    if (value >= 0) throw std::domain_error("discriminant must be negative");
    long long r = ((value % 4) + 4) % 4;
    if (r != 0 && r != 1) throw std::domain_error("discriminant must be 0 or 1 mod 4");
}

QuadForm::QuadForm(long long a, long long b, long long c) : a_(a), b_(b), c_(c) {
    if (b * b - 4 * a * c >= 0 || a <= 0) throw NotPositiveDefinite();
    if (gcd_ll(gcd_ll(a, b), c) != 1) throw std::domain_error("form is not primitive");
}

bool QuadForm::is_reduced() const {
    long long ab = b_ < 0 ? -b_ : b_;
    if (!(ab <= a_ && a_ <= c_)) return false;
    if ((ab == a_ || a_ == c_) && b_ < 0) return false;
    return true;
}

bool QuadForm::is_principal() const {
    return reduce_form(*this).a() == 1;
}

QuadForm QuadForm::inverse() const {
    return reduce_form(QuadForm(a_, -b_, c_));
}

bool QuadForm::operator<(const QuadForm& o) const {
    if (a_ != o.a_) return a_ < o.a_;
    long long ab = b_ < 0 ? -b_ : b_, ob = o.b_ < 0 ? -o.b_ : o.b_;
    if (ab != ob) return ab < ob;
    if (c_ != o.c_) return c_ < o.c_;
    return b_ > o.b_; // positive b sorts first
}

QuadForm principal_form(const Discriminant& d) {
    long long D = d.value();
    if (((D % 2) + 2) % 2 == 0) return QuadForm(1, 0, -D / 4);
    return QuadForm(1, 1, (1 - D) / 4);
}

QuadForm reduce_form(const QuadForm& f) {
    long long a = f.a(), b = f.b(), c = f.c();
    long long D = b * b - 4 * a * c;
    for (;;) {
        // Normalize: -a < b <= a.
        if (b > a || b <= -a) {
            long long t = ((b % (2 * a)) + 2 * a) % (2 * a);
            b = (t > a) ? t - 2 * a : t;
            c = (b * b - D) / (4 * a);
        }
        if (a > c) {
            std::swap(a, c);
            b = -b;
            continue;
        }
        break;
    }
    if (a == c && b < 0) b = -b;
    return QuadForm(a, b, c);
}

QuadForm compose(const QuadForm& f, const QuadForm& g) {
    if (f.discriminant() != g.discriminant()) throw DiscriminantMismatch();
    long long D = f.discriminant();

    // Cohen, Alg. 5.4.7, with c3 recovered from the discriminant.
    long long a1 = f.a(), b1 = f.b();
    long long a2 = g.a(), b2 = g.b(), c2 = g.c();
    if (a1 > a2) {
        std::swap(a1, a2);
        b1 = g.b();
        b2 = f.b();
        c2 = f.c();
    }
    long long s = (b1 + b2) / 2;
    long long n = b2 - s;

    long long u, v, d;
    long long y1;
    if (a2 % a1 == 0) {
        y1 = 0;
        d = a1;
    } else {
        d = xgcd(a2, a1, u, v);
        y1 = u;
    }
    long long x2, y2, d1;
    if (d != 0 && s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        d1 = xgcd(s, d, u, v);
        x2 = u;
        y2 = -v;
    }

    long long v1 = a1 / d1;
    long long v2 = a2 / d1;
    long long r = ((y1 * y2 % v1) * (n % v1) % v1 - (x2 % v1) * (c2 % v1) % v1) % v1;
    if (r < 0) r += v1;

    long long a3 = v1 * v2;
    long long b3 = b2 + 2 * v2 * r;
    long long twoa3 = 2 * a3;
    b3 = ((b3 % twoa3) + twoa3) % twoa3; // keep magnitudes small before reducing
    long long c3num = b3 * b3 - D;
    long long c3 = c3num / (4 * a3);
    if (c3num % (4 * a3) != 0) throw std::logic_error("compose: non-integral c3");
    return reduce_form(QuadForm(a3, b3, c3));
}

QuadForm power(const QuadForm& f, unsigned long e) {
    QuadForm acc = principal_form(Discriminant(f.discriminant()));
    QuadForm base = reduce_form(f);
    while (e) {
        if (e & 1) acc = compose(acc, base);
        base = compose(base, base);
        e >>= 1;
    }
    return acc;
}

std::vector<QuadForm> enumerate_class_group(const Discriminant& d) {
    long long D = d.value();
    std::vector<QuadForm> out;
    long long amax = static_cast<long long>(std::sqrt(static_cast<double>(-D) / 3.0)) + 1;
    for (long long a = 1; a <= amax; ++a) {
        for (long long b = -a; b <= a; ++b) {
            if (((b * b - D) % (4 * a)) != 0) continue;
            long long c = (b * b - D) / (4 * a);
            if (c < a) continue;
            if ((-b == a || a == c) && b < 0) continue; // tie rule: b >= 0
            if (gcd_ll(gcd_ll(a, b), c) != 1) continue;
            out.push_back(QuadForm(a, b, c));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

long long class_number(const Discriminant& d) {
    return static_cast<long long>(enumerate_class_group(d).size());
}

std::optional<QuadForm> prime_form(const Discriminant& d, long long q) {
    long long D = d.value();
    // Smallest b >= 0 with b = D mod 2 and b^2 = D mod 4q.
    long long mod = 4 * q;
    for (long long b = (D % 2 + 2) % 2; b < mod; b += 2) {
        long long lhs = ((b * b - D) % mod + mod) % mod;
        if (lhs == 0) {
            long long c = (b * b - D) / (4 * q);
            return reduce_form(QuadForm(q, b, c));
        }
    }
    return std::nullopt;
}

std::vector<QuadForm> factor_class(const QuadForm& f, const std::vector<long long>& factor_base,
                                   long long word_cap) {
    QuadForm target = reduce_form(f);
    Discriminant d(target.discriminant());
    if (word_cap <= 0) {
        long long h = class_number(d);
        long long lg = 0;
        while ((1LL << lg) < h) ++lg;
        word_cap = 3 * std::max<long long>(lg, 1);
    }

    std::vector<QuadForm> gens;
    for (long long q : factor_base) {
        auto pf = prime_form(d, q);
        if (pf) gens.push_back(*pf);
    }

    QuadForm id = principal_form(d);
    if (target == id) return {};
    if (gens.empty()) throw FactorBaseInsufficient();

    // BFS over ordered products of prime forms.
    std::map<QuadForm, std::vector<QuadForm>> seen;
    std::deque<QuadForm> frontier;
    seen.emplace(id, std::vector<QuadForm>{});
    frontier.push_back(id);
    while (!frontier.empty()) {
        QuadForm cur = frontier.front();
        frontier.pop_front();
        const auto& word = seen.at(cur);
        if (static_cast<long long>(word.size()) >= word_cap) continue;
        for (const auto& g : gens) {
            QuadForm nxt = compose(cur, g);
            if (seen.count(nxt)) continue;
            auto next_word = word;
            next_word.push_back(g);
            if (nxt == target) return next_word;
            seen.emplace(nxt, std::move(next_word));
            frontier.push_back(nxt);
        }
    }
    throw FactorBaseInsufficient();
}

CMPoint::CMPoint(const QuadForm& form) : form_(reduce_form(form)) {}

mpq_class CMPoint::tau_re() const {
    mpq_class r(mpz_from_ll(-form_.b()), mpz_from_ll(2 * form_.a()));
    r.canonicalize();
    return r;
}

mpq_class CMPoint::tau_im_squared() const {
    mpq_class r(mpz_from_ll(-form_.discriminant()), mpz_from_ll(4 * form_.a() * form_.a()));
    r.canonicalize();
    return r;
}

} // namespace msiforge::quad
