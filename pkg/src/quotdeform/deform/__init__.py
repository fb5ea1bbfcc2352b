from .setup import DeformationSetup, NotFlat, SetupError, build_setup, flat_problem
from .obstruction import (AtiyahData, ObstructionReport, RouteUnavailable, Solution, atiyah_obstruction,
                          basepoint_zero_u0, conormal_tensor_F0, elementary_obstruction, h0_ra,
                          route_equivalence, solution_from_retraction, solution_from_splitting,
                          splitting_from_solution, torsor_action, torsor_difference)
