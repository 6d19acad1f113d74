from typing import cast

from dependency_injector import containers, providers

from app.controllers.container import ControllerContainer
from settings import settings


class ApplicationContainer(containers.DeclarativeContainer):
    config = providers.Configuration()

    controllers: ControllerContainer = cast(ControllerContainer, providers.Container(ControllerContainer, config=config))


def get_wire_container() -> ApplicationContainer:
    """Container for one process; runtime knobs come from the environment-driven settings."""
    application_container = ApplicationContainer()
    application_container.config.from_dict(
        {
            "data_dir": settings.data.data_dir,
            "torch_num_threads": settings.runtime.torch_num_threads,
        }
    )
    return application_container
