import logging
from typing import Optional, Sequence

from superquant_toolkit.possys import service as possys_service
from superquant_toolkit.possys.service import Context
from superquant_toolkit.realform.service import normalize_tag
from superquant_toolkit.rootdata.service import AlgebraSpec
from superquant_utils import linalg

_CONTEXT_CACHE = {}


def get_context(spec: AlgebraSpec, tag: str, functional: Optional[Sequence] = None) -> Context:
    functional_key = None if functional is None else linalg.as_vector(functional)
    context_key = (spec, normalize_tag(tag), functional_key)
    if context_key not in _CONTEXT_CACHE:
        try:
            _CONTEXT_CACHE[context_key] = possys_service.build_context(spec, tag, functional_key)
            logging.debug(f"Context for {spec.label} / {tag} built and cached.")
        except Exception as e:
            logging.error(f"Failed to build context for {spec.label} / {tag}: {e}")
            raise
    return _CONTEXT_CACHE[context_key]


def clear_cache() -> None:
    _CONTEXT_CACHE.clear()
    logging.debug("Context cache cleared.")
