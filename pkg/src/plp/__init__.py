"""Provenance-first medication knowledge infrastructure.

Three cooperating layers over one data directory:

* a content-addressed, immutable, versioned document store (:mod:`plp.store`),
* an Evidence Pack engine with human curatorial gating (:mod:`plp.lector`),
* a canonical medication ontology refracted into audited contextual views
  (:mod:`plp.ontology`, :mod:`plp.refraction`).

:class:`plp.corpus.Corpus` binds the layers together; :mod:`plp.cli` and
:mod:`plp.service` expose them to the outside world.
"""

from plp.corpus import Corpus

__all__ = ["Corpus"]
__version__ = "0.1.0"
