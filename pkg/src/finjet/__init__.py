"""Finite-set stage semantics, graph-ball neighborhoods, and section-jet bundles."""

from .finset import FinMap, FinSet, PullbackResult, Span, UNIT
from .kripke import PartialMapAtStage, PartialSection, SubobjectAtStage, Witness
from .polyfun import Bundle, DependentProduct, SliceMorphism
from .relations import EndoRelation, Relation, RelationMorphism
from .jets import JetBundle, PhiContext, SectionJet
from .fibdual import Comorphism
from .workspace import Workspace, parse_workspace, serialize_workspace

__all__ = [
    "FinMap",
    "FinSet",
    "PullbackResult",
    "Span",
    "UNIT",
    "PartialMapAtStage",
    "PartialSection",
    "SubobjectAtStage",
    "Witness",
    "Bundle",
    "DependentProduct",
    "SliceMorphism",
    "EndoRelation",
    "Relation",
    "RelationMorphism",
    "JetBundle",
    "PhiContext",
    "SectionJet",
    "Comorphism",
    "Workspace",
    "parse_workspace",
    "serialize_workspace",
]
