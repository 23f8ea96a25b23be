"""citefronts: detect, characterize, and track research fronts in a
bibliographic citation network."""

from .clustering import (
    Partition,
    UGraph,
    cluster_cnm,
    filter_small,
    modularity,
    project_undirected,
    subcluster,
)
from .dynamics import FrontDynamics, peak_summary, yearly_counts
from .graph import (
    NOISE,
    CitationGraph,
    DegreeHistogram,
    QuotientGraph,
    build_graph,
    extract_core,
    indegree_histogram,
    largest_component,
    quotient,
)
from .layout import LayoutResult, export_graph, layout_force
from .powerlaw import PowerLawFit, fit_power_law
from .records import (
    CitationKey,
    Corpus,
    RawRecord,
    citation_key,
    parse_records,
    records_to_lines,
    resolve_citations,
)
from .synth import FrontSpec, GroundTruth, SynthConfig, generate_corpus, nmi
from .terms import TermScore, score_terms, tokenize, top_cited

__version__ = "0.1.0"

__all__ = [
    "NOISE",
    "CitationGraph",
    "CitationKey",
    "Corpus",
    "DegreeHistogram",
    "FrontDynamics",
    "FrontSpec",
    "GroundTruth",
    "LayoutResult",
    "Partition",
    "PowerLawFit",
    "QuotientGraph",
    "RawRecord",
    "SynthConfig",
    "TermScore",
    "UGraph",
    "build_graph",
    "citation_key",
    "cluster_cnm",
    "export_graph",
    "extract_core",
    "filter_small",
    "fit_power_law",
    "generate_corpus",
    "indegree_histogram",
    "largest_component",
    "layout_force",
    "modularity",
    "nmi",
    "parse_records",
    "peak_summary",
    "project_undirected",
    "quotient",
    "records_to_lines",
    "resolve_citations",
    "score_terms",
    "subcluster",
    "tokenize",
    "top_cited",
    "yearly_counts",
]
