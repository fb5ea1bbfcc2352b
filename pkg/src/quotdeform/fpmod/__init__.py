from .module import (FPModule, ModuleElement, ModuleHom, NotFiniteDimensional, NotWellDefined, free_module,
                     hom, identity_hom, join_rings, meet_rings, present, zero_hom)
from .ops import (DirectSum, HomModule, ResolutionFragment, base_change, base_change_hom, cokernel,
                  direct_sum, hom_module, image, inverse_of_iso, is_exact, is_injective, is_isomorphism,
                  is_surjective, kernel, prune, quotient_module, rank_nullity_ok, resolution_fragment,
                  submodule, tensor, tensor_coeffs, tensor_hom)
