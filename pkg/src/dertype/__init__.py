"""Derived representation type of complete local and two-point algebras."""
from .catalog import catalog_lookup, crosscheck_tables, get_entry, load_catalog
from .classifier import ClassificationResult, classify
from .complexes import (ProjectiveComplex, RationalFamilyComplex, check_complex, endomorphism_presentation,
                        homology_dims, specialize_family, vector_rank)
from .dsl import parse_element, parse_presentation
from .fields import QQ, PrimeField
from .forms import BOXES, BoxSpec, find_negative_vector, is_wild_hereditary, tits_form
from .quiver import AlgebraElement, Presentation, Quiver, is_admissible
from .recognition import is_gentle, is_nodal, is_special_biserial, normalize_presentation
from .truncated import TruncatedAlgebra
from .wildness import (ModulePair, get_bimodule, get_template, instantiate_witness, module_iso,
                       strict_wildness_gate, verify_zero_composition)

__version__ = "0.1.0"
