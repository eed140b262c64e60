from .homology import HomologyLabeling, SystoleSearchError, loop_class, systole_in_class
from .linking import gauss_linking, linking_number
from .mesh import MeshError, TorusMesh, read_mesh, write_mesh

__all__ = [
    "HomologyLabeling",
    "MeshError",
    "SystoleSearchError",
    "TorusMesh",
    "gauss_linking",
    "linking_number",
    "loop_class",
    "read_mesh",
    "systole_in_class",
    "write_mesh",
]
