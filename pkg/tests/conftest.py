import pytest

from freyr.backend import GenerationOptions, RoleConfig
from freyr.dungeon import Corridor, Dungeon, Enemy, Room, Treasure
from freyr.pipeline import PipelineConfig
from freyr.tools import registry


def make_config(max_retries: int = 3, max_intents: int = 10) -> PipelineConfig:
    roles = {}
    for role in ("intent", "parameters", "summary", "chat"):
        roles[role] = RoleConfig(role=role,
                                 options=GenerationOptions(model="scripted"))
    return PipelineConfig(roles=roles, max_retries=max_retries,
                          max_intents=max_intents)


@pytest.fixture
def cfg() -> PipelineConfig:
    return make_config()


@pytest.fixture
def reg():
    return registry()


@pytest.fixture
def three_rooms() -> Dungeon:
    """Rome - Paris - Barcelona chain with one enemy and one treasure."""
    return Dungeon(
        name="Grand Tour",
        rooms={
            "Rome": Room("Rome", "Crumbling columns.", enemies=[
                Enemy("Goblin Archer", "A wiry goblin.", "goblin", 10)]),
            "Paris": Room("Paris", "Iron lanterns.", treasures=[
                Treasure("Gilded Chest", "A slim case.", "a map piece")]),
            "Barcelona": Room("Barcelona", "Bright tilework."),
        },
        corridors={
            "Rome-Paris": Corridor("Rome", "Paris"),
            "Paris-Barcelona": Corridor("Paris", "Barcelona", length=3),
        })
