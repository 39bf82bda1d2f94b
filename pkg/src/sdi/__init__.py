"""Miniature spatial data infrastructure: metadata catalog, capabilities
harvester, combined keyword/semantic/spatial search, and a geoportal API."""

from .catalog import Catalog, InvalidBoxError, InvariantViolation, Posting, SpatialRelation
from .capabilities import (
    LayerDescription,
    ServiceDescription,
    geographic_extent,
    layer_to_record,
    parse_capabilities,
)
from .harvest import HarvestJob, HarvestReport, fetch_capabilities, harvest
from .metadata import (
    GeographicBoundingBox,
    MetadataProfile,
    MetadataRecord,
    SDI_BASIC,
    ValidationReport,
    completeness_score,
    from_canonical,
    to_canonical,
    validate_record,
)
from .search import SearchQuery, SearchResult, expand_query, facet_counts, search
from .text import tokenize
from .thesaurus import Thesaurus, load_thesaurus, parse_thesaurus

__version__ = "0.1.0"
