from abc import ABC


class Entity(ABC):
    """Base class for all domain entities.

    Entities are identified by a stable string id (scene id, video id, ...)
    so that regenerating them from the same seeds yields the same identity.
    """
    
    def __init__(self, id: str):
        if not id:
            raise ValueError("Entity id must be a non-empty string")
        self.id = id
    
    def __eq__(self, other):
        if not isinstance(other, Entity):
            return False
        return type(self) is type(other) and self.id == other.id
    
    def __hash__(self):
        return hash((type(self).__name__, self.id))
