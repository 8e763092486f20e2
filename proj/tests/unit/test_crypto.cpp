#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "silentdelivery/crypto/box.hpp"
#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/hash.hpp"
#include "silentdelivery/crypto/onion.hpp"
#include "silentdelivery/crypto/shamir.hpp"
#include "silentdelivery/crypto/signature.hpp"
#include "silentdelivery/crypto/symmetric.hpp"

using namespace sd;

namespace {

// Plain int64 arithmetic mod 257, kept separate from the BigInt field code.
constexpr std::int64_t kP = 257;

std::int64_t mod(std::int64_t x) { return ((x % kP) + kP) % kP; }

std::int64_t pow_mod(std::int64_t b, std::int64_t e) {
  std::int64_t r = 1;
  b = mod(b);
  while (e > 0) {
    if (e & 1) r = r * b % kP;
    b = b * b % kP;
    e >>= 1;
  }
  return r;
}

std::int64_t oracle_lagrange_at_zero(const std::vector<std::pair<std::int64_t, std::int64_t>>& pts) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::int64_t num = 1, den = 1;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      num = mod(num * -pts[j].first);
      den = mod(den * (pts[i].first - pts[j].first));
    }
    acc = mod(acc + pts[i].second * num % kP * pow_mod(den, kP - 2));
  }
  return acc;
}

std::vector<Share> pick(const std::vector<Share>& all, unsigned mask) {
  std::vector<Share> out;
  for (unsigned i = 0; i < all.size(); ++i)
    if (mask & (1u << i)) out.push_back(all[i]);
  return out;
}

}  // namespace

TEST(Hash, Blake2b256Goldens) {
  EXPECT_EQ(hash256({}).hex(), "0e5751c026e543b2e8ab2eb06099daa1d1e5df47778f7787faab45cdf12fe3a8");
  EXPECT_EQ(hash256(as_bytes("abc")).hex(), "bddd813c634239723171ef3fee98579b94964e3bb1cb3e427262c8c068d52319");
}

TEST(Hash, FieldsAreLengthPrefixed) {
  EXPECT_NE(hash_fields({as_bytes("ab"), as_bytes("c")}), hash_fields({as_bytes("a"), as_bytes("bc")}));
}

TEST(Shamir, PinnedCoefficientsMatchHandValues) {
  const auto& f = PrimeField::small();
  std::vector<BigInt> coeffs{7, 3};
  auto shares = split_with_coefficients(42, coeffs, 5, f);
  std::vector<int> expect{52, 68, 90, 118, 152};
  ASSERT_EQ(shares.size(), 5u);
  for (unsigned i = 0; i < 5; ++i) {
    EXPECT_EQ(shares[i].index, i + 1);
    EXPECT_EQ(shares[i].value, BigInt(expect[i]));
  }
  std::vector<Share> subset{shares[1], shares[3], shares[4]};
  EXPECT_EQ(restore_value(subset, 3, f), BigInt(42));
}

TEST(Shamir, WrongThresholdGivesWrongSecret) {
  const auto& f = PrimeField::small();
  std::vector<BigInt> coeffs{1, 2, 3, 4};
  auto shares = split_with_coefficients(42, coeffs, 5, f);
  std::vector<int> expect{52, 140, 211, 9, 145};
  for (unsigned i = 0; i < 5; ++i) EXPECT_EQ(shares[i].value, BigInt(expect[i]));
  EXPECT_EQ(restore_value(shares, 5, f), BigInt(42));
  std::vector<Share> first4(shares.begin(), shares.begin() + 4);
  std::vector<Share> last4(shares.begin() + 1, shares.end());
  EXPECT_EQ(restore_value(first4, 4, f), BigInt(203));
  EXPECT_EQ(restore_value(last4, 4, f), BigInt(76));
  EXPECT_THROW(restore_value(first4, 5, f), InsufficientSharesError);
}

TEST(Shamir, ExhaustiveSubsetsSmallField) {
  const auto& f = PrimeField::small();
  Rng rng(2024);
  for (unsigned n = 1; n <= 6; ++n) {
    for (unsigned t = 1; t <= n; ++t) {
      const BigInt secret = f.random(rng);
      std::vector<BigInt> coeffs;
      for (unsigned k = 1; k < t; ++k) coeffs.push_back(f.random(rng));
      auto shares = split_with_coefficients(secret, coeffs, n, f);
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        auto subset = pick(shares, mask);
        if (subset.size() < t) {
          EXPECT_THROW(restore_value(subset, t, f), InsufficientSharesError);
          continue;
        }
        EXPECT_EQ(restore_value(subset, t, f), secret) << "t=" << t << " n=" << n << " mask=" << mask;
        std::vector<std::pair<std::int64_t, std::int64_t>> pts;
        for (unsigned i = 0; i < t; ++i)
          pts.emplace_back(subset[i].index, subset[i].value.convert_to<std::int64_t>());
        EXPECT_EQ(BigInt(oracle_lagrange_at_zero(pts)), secret);
      }
    }
  }
}

TEST(Shamir, RejectsBadIndices) {
  const auto& f = PrimeField::small();
  std::vector<Share> dup{{1, 5, 0}, {1, 6, 0}};
  EXPECT_THROW(restore_value(dup, 2, f), ParameterError);
  std::vector<Share> zero{{0, 5, 0}, {2, 6, 0}};
  EXPECT_THROW(restore_value(zero, 2, f), ParameterError);
  EXPECT_THROW(split_with_coefficients(1, std::vector<BigInt>{1, 2, 3}, 3, f), ParameterError);
}

TEST(Shamir, Full256BitKeyRoundTrip) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto key = random_secret(rng);
    auto shares = ss_split(key, 4, 10, rng);
    std::vector<Share> some{shares[9], shares[2], shares[5], shares[0]};
    EXPECT_EQ(ss_restore(some, 4), key);
    for (const auto& s : shares) EXPECT_EQ(decode_share(encode_share(s)), s);
  }
  SecretKey256 ones;
  ones.bytes.fill(0xff);
  auto shares = ss_split(ones, 2, 3, rng);
  EXPECT_EQ(ss_restore(std::vector<Share>{shares[2], shares[1]}, 2), ones);
}

TEST(Onion, EveryPeelOrderUpToDepthThree) {
  Rng rng(11);
  Share share{3, 123456789, 0};
  for (unsigned l = 1; l <= 3; ++l) {
    std::vector<BoxKeyPair> kps;
    std::vector<BoxPublicKey> pubs;
    for (unsigned i = 0; i < l; ++i) {
      kps.push_back(box_keypair(rng));
      pubs.push_back(kps.back().pub);
    }
    auto wrapped = onion_wrap(share, pubs, rng);
    EXPECT_EQ(wrapped.layers_remaining, l);
    std::vector<unsigned> order(l);
    std::iota(order.begin(), order.end(), 0u);
    do {
      // The only valid peel order is outermost (last wrap key) first.
      bool valid = true;
      for (unsigned i = 0; i < l; ++i) valid = valid && order[i] == l - 1 - i;
      Onion o = decode_onion(encode_onion(wrapped));
      bool failed = false;
      for (unsigned i = 0; i < l && !failed; ++i) {
        try {
          o = onion_peel(o, kps[order[i]].secret);
        } catch (const AuthenticationError&) {
          failed = true;
        }
      }
      EXPECT_EQ(!failed, valid);
      if (valid) {
        EXPECT_EQ(onion_share(o), share);
        EXPECT_THROW(onion_peel(o, kps[0].secret), OnionStateError);
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

TEST(Onion, PartialOnionHasNoShare) {
  Rng rng(3);
  auto a = box_keypair(rng), b = box_keypair(rng);
  std::vector<BoxPublicKey> pubs{a.pub, b.pub};
  auto o = onion_wrap(Share{1, 9, 0}, pubs, rng);
  EXPECT_THROW(onion_share(o), OnionStateError);
  EXPECT_THROW(onion_share(onion_peel(o, b.secret)), OnionStateError);
}

TEST(Signature, FuzzRecoverAndReject) {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    auto kp = keypair_gen(rng);
    auto digest = Digest256::from(rng.fixed<32>());
    auto sig = sign(kp, digest);
    EXPECT_EQ(recover_signer(digest, sig), kp.address);

    auto other = digest;
    other.bytes[rng.uniform(0, 31)] ^= static_cast<std::uint8_t>(1u << rng.uniform(0, 7));
    EXPECT_THROW(recover_signer(other, sig), VerificationError);

    auto bad = sig;
    bad.bytes[rng.uniform(32, 95)] ^= static_cast<std::uint8_t>(1u << rng.uniform(0, 7));
    EXPECT_THROW(recover_signer(digest, bad), VerificationError);
  }
}

TEST(Signature, SeedDeterminesAddress) {
  FixedBytes<32> seed;
  seed.bytes.fill(5);
  EXPECT_EQ(keypair_from_seed(seed).address, keypair_from_seed(seed).address);
  EXPECT_EQ(keypair_from_seed(seed).address, address_of(keypair_from_seed(seed).pubkey));
}

TEST(Box, SealOpenAndPairing) {
  Rng rng(5);
  auto kp = box_keypair(rng), other = box_keypair(rng);
  auto sealed = seal(kp.pub, as_bytes("hello"), rng);
  EXPECT_EQ(sealed.size(), 5 + kSealOverhead);
  auto opened = open_sealed(kp.secret, sealed);
  EXPECT_EQ(std::string(opened.begin(), opened.end()), "hello");
  EXPECT_THROW(open_sealed(other.secret, sealed), AuthenticationError);
  EXPECT_TRUE(box_pairs(kp.secret, kp.pub));
  EXPECT_FALSE(box_pairs(other.secret, kp.pub));
}

TEST(Symmetric, TamperDetected) {
  Rng rng(6);
  auto key = random_secret(rng);
  auto ct = sym_encrypt(key, as_bytes("secret info"), rng);
  auto pt = sym_decrypt(key, ct);
  EXPECT_EQ(std::string(pt.begin(), pt.end()), "secret info");
  ct.back() ^= 1;
  EXPECT_THROW(sym_decrypt(key, ct), AuthenticationError);
  EXPECT_THROW(sym_decrypt(random_secret(rng), sym_encrypt(key, as_bytes("x"), rng)), AuthenticationError);
}

TEST(Rng, ForkIndependentOfConsumption) {
  Rng a(1), b(1);
  for (int i = 0; i < 10; ++i) b();
  EXPECT_EQ(a.fork("x")(), b.fork("x")());
  EXPECT_NE(a.fork("x")(), a.fork("y")());
}
