import os

WORKERS = max(1, int(os.getenv("LAMP_WORKERS", "1")))
CLUSTER_TOL = float(os.getenv("LAMP_CLUSTER_TOL", "1e-8"))
PRIME_SEED = int(os.getenv("LAMP_PRIME_SEED", "0"))
PRIME_COUNT = max(3, int(os.getenv("LAMP_PRIME_COUNT", "3")))
EXACT_RANK_MAX_DIM = int(os.getenv("LAMP_EXACT_RANK_MAX_DIM", "1024"))
DENSE_MAX_DIM = int(os.getenv("LAMP_DENSE_MAX_DIM", "4096"))
SUPPORT_CEILING = int(os.getenv("LAMP_SUPPORT_CEILING", "20000000"))
RELATION_K = int(os.getenv("LAMP_RELATION_K", "8"))
SAMPLES = int(os.getenv("LAMP_SAMPLES", "10000"))
EXTENDED_DPS = int(os.getenv("LAMP_EXTENDED_DPS", "30"))
CHECK_TOL = float(os.getenv("LAMP_CHECK_TOL", "1e-6"))

TREE_MAX_LEVEL = 16
QUOTIENT_MIN, QUOTIENT_MAX = 2, 12
INTEGER_EIGENVALUES = (-4, -2, 0, 2, 4)
