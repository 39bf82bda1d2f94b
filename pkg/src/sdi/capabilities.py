"""WMS-style GetCapabilities parsing and conversion of layers into records.

Parses the reduced element set Capability/Request/Layer/Title/CRS/
EX_GeographicBoundingBox/BoundingBox. Namespace prefixes on element names are
tolerated (matching is by local name). EPSG:4326 BoundingBox values are kept
verbatim at parse time (latitude-first axis order as published); the axis swap
happens only in ``geographic_extent``.
"""

from __future__ import annotations

import hashlib
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .metadata import GeographicBoundingBox, MetadataRecord

KNOWN_OPERATIONS = ("GetCapabilities", "GetMap", "GetFeatureInfo", "GetStyles")
OTHER_OPERATION = "other"

# Sub-layers are parsed one level deep; anything deeper is skipped with a warning.
MAX_LAYER_DEPTH = 2


class CapabilitiesError(Exception):
    pass


class CapabilitiesSyntaxError(CapabilitiesError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class CapabilitiesStructureError(CapabilitiesError):
    pass


class CapabilitiesNumericError(CapabilitiesError):
    def __init__(self, element: str, value: str):
        super().__init__(f"{element}: not a number: {value!r}")
        self.element = element


class NoExtentError(CapabilitiesError):
    pass


class CrsBoundingBox(NamedTuple):
    crs: str
    minx: float
    miny: float
    maxx: float
    maxy: float


@dataclass(frozen=True)
class LayerDescription:
    title: str
    crs_list: tuple[str, ...]
    geographic_bbox: GeographicBoundingBox | None
    crs_bboxes: tuple[CrsBoundingBox, ...]


@dataclass(frozen=True)
class ServiceDescription:
    source_url: str
    operations: frozenset[str]
    layers: tuple[LayerDescription, ...]


def _localname(tag: str) -> str:
    if tag.startswith("{"):
        return tag.split("}", 1)[1]
    if ":" in tag:
        return tag.split(":", 1)[1]
    return tag


def _children(element: ET.Element, name: str) -> Iterator[ET.Element]:
    for child in element:
        if _localname(child.tag) == name:
            yield child


def _find(element: ET.Element, name: str) -> ET.Element | None:
    for child in _children(element, name):
        return child
    return None


def _parse_float(text: str | None, element: str) -> float:
    if text is None or not text.strip():
        raise CapabilitiesNumericError(element, "" if text is None else text)
    try:
        return float(text.strip())
    except ValueError:
        raise CapabilitiesNumericError(element, text.strip()) from None


def parse_capabilities(xml_text: str, source_url: str) -> ServiceDescription:
    """Parse a capabilities document into a service description."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (0, 0)
        raise CapabilitiesSyntaxError(str(exc.msg), line, column) from exc

    if _localname(root.tag) == "Capability":
        capability = root
    else:
        capability = next(
            (el for el in root.iter() if _localname(el.tag) == "Capability"), None
        )
    if capability is None:
        raise CapabilitiesStructureError("document has no <Capability> element")

    request = _find(capability, "Request")
    if request is None:
        raise CapabilitiesStructureError("<Capability> has no <Request> element")
    operations = set()
    for child in request:
        name = _localname(child.tag)
        operations.add(name if name in KNOWN_OPERATIONS else OTHER_OPERATION)
    if not operations:
        raise CapabilitiesStructureError("<Request> lists no operations")

    layers = tuple(_parse_layers(capability, depth=1))
    return ServiceDescription(
        source_url=source_url, operations=frozenset(operations), layers=layers
    )


def _parse_layers(parent: ET.Element, depth: int) -> Iterator[LayerDescription]:
    for element in _children(parent, "Layer"):
        yield _parse_layer(element)
        if depth < MAX_LAYER_DEPTH:
            yield from _parse_layers(element, depth + 1)
        elif _find(element, "Layer") is not None:
            warnings.warn(
                f"skipping sub-layers nested deeper than {MAX_LAYER_DEPTH} levels"
            )


def _parse_layer(element: ET.Element) -> LayerDescription:
    title_element = _find(element, "Title")
    title = (title_element.text or "").strip() if title_element is not None else ""

    crs_list = tuple(
        (crs.text or "").strip() for crs in _children(element, "CRS") if (crs.text or "").strip()
    )

    geographic_bbox = None
    ex_box = _find(element, "EX_GeographicBoundingBox")
    if ex_box is not None:
        values = {}
        for side, tag in (
            ("west", "westBoundLongitude"),
            ("east", "eastBoundLongitude"),
            ("south", "southBoundLatitude"),
            ("north", "northBoundLatitude"),
        ):
            child = _find(ex_box, tag)
            if child is None:
                raise CapabilitiesStructureError(f"<EX_GeographicBoundingBox> missing <{tag}>")
            values[side] = _parse_float(child.text, tag)
        geographic_bbox = GeographicBoundingBox(**values)
        problems = geographic_bbox.violations()
        if problems:
            raise CapabilitiesStructureError(
                "invalid <EX_GeographicBoundingBox>: " + "; ".join(problems)
            )

    crs_bboxes = []
    for box_element in _children(element, "BoundingBox"):
        crs = (box_element.get("CRS") or box_element.get("SRS") or "").strip()
        if not crs:
            warnings.warn("skipping <BoundingBox> without a CRS attribute")
            continue
        if crs not in crs_list:
            warnings.warn(f"skipping <BoundingBox> with undeclared CRS {crs!r}")
            continue
        coords = {}
        for attr in ("minx", "miny", "maxx", "maxy"):
            raw = box_element.get(attr)
            if raw is None:
                raise CapabilitiesStructureError(f"<BoundingBox CRS={crs!r}> missing {attr!r}")
            coords[attr] = _parse_float(raw, f"BoundingBox[{crs}].{attr}")
        crs_bboxes.append(CrsBoundingBox(crs=crs, **coords))

    return LayerDescription(
        title=title,
        crs_list=crs_list,
        geographic_bbox=geographic_bbox,
        crs_bboxes=tuple(crs_bboxes),
    )


def geographic_extent(layer: LayerDescription) -> GeographicBoundingBox:
    """Normalize a layer's extent to lon/lat degrees.

    Preference order: the geographic bbox; the CRS:84 box (already lon-first);
    the EPSG:4326 box with its latitude-first axes swapped.
    """
    if layer.geographic_bbox is not None:
        return layer.geographic_bbox
    by_crs = {box.crs: box for box in layer.crs_bboxes}
    crs84 = by_crs.get("CRS:84")
    if crs84 is not None:
        return GeographicBoundingBox(
            west=crs84.minx, east=crs84.maxx, south=crs84.miny, north=crs84.maxy
        )
    epsg4326 = by_crs.get("EPSG:4326")
    if epsg4326 is not None:
        return GeographicBoundingBox(
            west=epsg4326.miny, east=epsg4326.maxy, south=epsg4326.minx, north=epsg4326.maxx
        )
    raise NoExtentError(f"layer {layer.title!r} has no usable spatial extent")


def record_id_for_layer(source_url: str, layer_title: str) -> str:
    """Stable 128-bit digest so re-harvests upsert instead of duplicating."""
    digest = hashlib.md5(f"{source_url}|{layer_title}".encode("utf-8"))
    return digest.hexdigest()


def layer_to_record(
    service: ServiceDescription, layer: LayerDescription, publisher: str
) -> MetadataRecord:
    """Build a publishable service record from one parsed layer."""
    bbox = geographic_extent(layer)
    return MetadataRecord(
        id=record_id_for_layer(service.source_url, layer.title),
        resource_type="service",
        title=layer.title,
        abstract=f"Layer '{layer.title}' served by {service.source_url}",
        bbox=bbox,
        crs_list=layer.crs_list,
        publisher=publisher,
        access_endpoints=(("WMS", service.source_url),),
    )
