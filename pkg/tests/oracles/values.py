"""Reference numbers produced by ``derive.py`` (independent of the package)."""

# single-Debye water permittivity at 20 C
EPS_W_4_9_GHZ = complex(74.303847821159218, -19.92762405176204)
EPS_W_10_GHZ = complex(60.768523981383471, -32.670477919366459)

# symmetry-axis depolarization factor of an oblate spheroid, by quadrature
L_A_QUADRATURE = {0.3: 0.34599010929414753, 0.6: 0.39444033780265036, 0.9: 0.5650257673612349}
L_A_AXIS_RATIO_0_9 = 0.3618219830955073

# polarizabilities in m^3
SPHERE_ALPHA_1MM_4_9_PRINTED = complex(1.5909875258464253e-9, 5.564885355042042e-12)
SPHERE_ALPHA_1MM_4_9_TEXTBOOK = complex(1.5129814024411621e-9, -1.5099029865474224e-11)
ELLIPSOID_ALPHA_2MM_10_PRINTED = complex(3.046968568376224e-9, -1.5607389072595104e-11)
ELLIPSOID_ALPHA_2MM_10_TEXTBOOK = complex(1.1174980448437703e-8, -2.1000508184524358e-10)

# exponential fall-speed fit at 5.8 mm
FALL_SPEED_5_8MM = 9.332683666362664

# oblate L_a closed form at 50 digits for small eccentricities (no cancellation)
L_A_SMALL_E = {
    1e-3: 0.33333346666674285,
    0.02: 0.3333866788603946,
    0.0499: 0.3336658078446297,
    0.05: 0.33366714365223943,
    0.2: 0.338791919796854,
}

# ITU-R P.838-3 horizontal regression evaluated directly, R = 12.5 mm/h
ITU_GAMMA_12_5 = {10.0: 0.29114223173386555, 20.0: 1.3221827975360838, 30.0: 2.6371867871523316}

# squared continuum L2 norm of exp(-x^2 / w0^2): integral of exp(-2 x^2 / w0^2) = w0 * sqrt(pi / 2)
GAUSSIAN_NORM_SQ_W0_0_5 = 0.6266570686577501
