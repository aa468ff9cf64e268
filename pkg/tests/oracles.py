"""Frozen reference values.

Each value was derived by hand (or by a closed-form identity) before the code
that computes it was written; the derivation is recorded next to it.
"""

from fractions import Fraction

# Thue-Morse doubling from t = 0, alpha = 1:
#   1 -> 1|1 -> 11|01 -> 1101|0011 -> 11010011|00101101 (reflect, last digit +1 each time)
THUE_MORSE_15 = "110100110010110"
THUE_MORSE_16 = "1101001100101101"

# p = 2, t = 10: d_1 d_2 = 11, then 11|01, 1101|0011, 11010011|00101101
PMIRROR_T10_P2_16 = "1101001100101101"

# closed forms: beta^2 = beta + 1 gives 1 = 1/beta + 1/beta^2, so d(phi) = (10)^inf;
# beta^3 = beta^2 + beta + 1 gives d(tribonacci) = (110)^inf
D_PHI_PERIOD = (1, 0)
D_TRIBONACCI_PERIOD = (1, 1, 0)
PHI_POLY = (1, -1, -1)
TRIBONACCI_POLY = (1, -1, -1, -1)

# beta^4 = beta^3 + beta^2 + beta + 1 gives d = (1110)^inf
QUARTIC_POLY = (1, -1, -1, -1, -1)
D_QUARTIC_PERIOD = (1, 1, 1, 0)
# beta^3 - 2 beta^2 + beta - 1 = 0, beta ~ 1.75488: (1/b + 1/b^2)/(1 - 1/b^4) = 1 reduces to
# b^4 - b^3 - b^2 - 1 = (b + 1)(b^3 - 2b^2 + b - 1) = 0, so d = (1100)^inf
CUBIC2_POLY = (1, -2, 1, -1)
D_CUBIC2_PERIOD = (1, 1, 0, 0)

# quasi-greedy at the integer base 2 with alpha = 2: 1 = sum 1/2^j, digits all 1 (exact hit resets r = 1)
BASE2_ALPHA2_DIGITS = "11111"

# Komornik-Loreti constant, alpha = 1 (root of sum t_j beta^-j = 1 for the Thue-Morse sequence)
BETA_C_1_DIGITS = "1.787231650"
# alpha = 2, generator t = 1
BETA_C_2_DIGITS = "2.53594"

# Key construction at tribonacci: d = (110)^inf, dbar = (001)^inf.  The longest prefix of d
# inside the periodic part of dbar is "1", so k0 = l0 = 1 and N = 0; "1" sits at offsets 2, 5, 8, ...
# of dbar, so n_k = 3k - 1 and m_k = n_k + k0 + 1 = 3k + 1.
TRIBONACCI_M0 = [3 * k + 1 for k in range(1, 11)]
# first word v_1 = d_1..d_4^- = 1100, v_2 = d_1..d_7^- = 1101100
TRIBONACCI_V1 = (1, 1, 0, 0)
TRIBONACCI_V2 = (1, 1, 0, 1, 1, 0, 0)

# Critical construction at beta_c: t_n = lcp(sigma^n dbar, d) with d = 11010011..., dbar = 00101100...
# t_0 = t_1 = 0 and t_2 = lcp(10110011..., 11010011...) = 1, so n_1 = 2 and m_1 = 2 + 1 + 1 = 4.
# The doubling rule makes each later step four times longer: n_k = 2 * 4^(k-1), m_k = 4^k.
BETA_C_M0 = [4**k for k in range(1, 10)]
BETA_C_N = [2 * 4 ** (k - 1) for k in range(1, 10)]

# Fast block construction at beta_c with theta_n = n: k_i = ceil(beta_c^(2^(i+1))):
# beta_c^4 = 10.2029..., beta_c^8 = 104.0996..., beta_c^16 = 10836.7...
FAST_BLOCK_COUNTS_THETA_N = {1: 11, 2: 105, 3: 10837}

# Binary-tree lemma at gamma = 1/2: sigma_1 = 2, sigma_2 = 3 and
# sigma_11 = 3, sigma_12 = 4, sigma_21 = 5, sigma_22 = 7
S1_HALF = Fraction(3, 8)
S2_HALF = Fraction(29, 128)
SIGMA_LEVEL_2 = [3, 4, 5, 7]

# Moran equation for the full shift: (alpha + 1) beta^-s = 1, s = log(alpha + 1) / log(beta)
FULL_SHIFT = {(1, Fraction(19, 10)): 1.0799142849993957, (2, Fraction(5, 2)): 1.198977846715787}

# admissibility for alpha = 1: t = 0 and every 1^k 0^l with k >= l >= 1 are admissible;
# 1010 fails at i = 3 (second family: 11 followed by reflect(10) = 1101 > 1011)
# Up to length four these are all of them (1010 and 100 are the only other candidates
# not ruled out by the last-digit rule or by a leading 0 reflecting above u).
ADMISSIBLE_ALPHA1 = [(0,), (1, 0), (1, 1, 0), (1, 1, 0, 0), (1, 1, 1, 0)]
ONES_ZEROS_FAMILY = [(1,) * k + (0,) * l for k in range(1, 6) for l in range(1, k + 1)]
NOT_ADMISSIBLE_1010 = (3, 2)
NOT_ADMISSIBLE_100 = (2, 1)  # (i, family): reflect(001) = 110 > 101
