BEFORE_COVER = "before_cover"
AFTER_COVER = "after_cover"
BEFORE_REPAIR = "before_repair"
AFTER_ROUND = "after_round"
CANDIDATE_STALLED = "candidate_stalled"
AFTER_REPAIR = "after_repair"
AFTER_BOUND = "after_bound"

# Fixed-point weights: one unit is 10**-9.
SCALE = 10**9
FRACTION_DIGITS = 9

INSTANCE_HEADER = "mfas 1"
SOLUTION_HEADER = "delta 1"
MAX_VERTICES = 4096

ENGINE_VERSION = "mfas-cover/0.1.0"
ALPHA_GUARANTEE = 3
