import ssl
from datetime import timedelta

from celery import Celery

from .config import settings

primewalk = Celery(
    # Name of top-level module is first argument
    # https://docs.celeryq.dev/en/stable/getting-started/first-steps-with-celery.html#application
    "primewalk",
    broker=settings.primewalk_broker_url,
    backend=settings.primewalk_backend_url,
    include=["primewalk.tasks"],
)

primewalk.conf.update(
    # All configuration documentation here:
    # https://docs.celeryq.dev/en/stable/userguide/configuration.html
    # NOTE: pickle so segments come back as numpy arrays and summaries as models.
    broker_connection_retry_on_startup=True,
    task_serializer="pickle",
    accept_content=["pickle"],
    result_serializer="pickle",
    task_track_started=True,
    task_acks_late=True,
    task_always_eager=settings.primewalk_task_always_eager,
    worker_prefetch_multiplier=settings.primewalk_prefetch_multiplier,
    worker_concurrency=settings.primewalk_worker_concurrency,
    result_expires=timedelta(seconds=settings.primewalk_result_expires),
)

# NOTE: If using SSL secured connection to broker, client-side certificate
# verification is disabled so the broker can sit behind a reverse proxy that
# provisions its own certificates.
# https://docs.celeryq.dev/en/stable/userguide/configuration.html#std-setting-broker_use_ssl
if "amqps" in settings.primewalk_broker_url:
    primewalk.conf.update(
        broker_use_ssl={
            "cert_reqs": ssl.CERT_NONE,
        },
    )
