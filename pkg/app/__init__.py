from app.logging_config import configure_logging

configure_logging()
