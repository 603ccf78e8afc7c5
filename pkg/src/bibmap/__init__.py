"""bibmap: term maps, citation-based topic clustering, and cross-discipline
interface analytics for publication corpora."""

__version__ = "0.1.0"
