"""
Celery Configuration for batch reconstruction runs
Instances are independent: every task builds its own family, engine and oracle
and returns an immutable report dictionary
"""

from celery import Celery
from kombu import Queue

from app.config import settings

TASK_QUEUES = {
    "app.tasks.celery_tasks.verify_instance_task": "verify",
    "app.tasks.celery_tasks.reconstruct_instance_task": "reconstruct",
    "app.tasks.celery_tasks.bench_instance_task": "bench",
}

# Benchmarks time a whole size ladder per task
BENCH_TIME_FACTOR = 4

celery_app = Celery(
    "hull_reconstruction",
    broker=settings.CELERY_BROKER_URL,
    backend=settings.CELERY_RESULT_BACKEND,
    include=["app.tasks.celery_tasks"]
)

celery_app.conf.update(
    # Routing: one queue per task kind
    task_queues=[Queue(name) for name in sorted(set(TASK_QUEUES.values()))],
    task_routes={task: {"queue": queue} for task, queue in TASK_QUEUES.items()},
    task_default_queue="verify",

    # Reports are plain JSON dictionaries
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    enable_utc=True,

    task_time_limit=settings.TASK_TIME_LIMIT,
    task_soft_time_limit=max(1, settings.TASK_TIME_LIMIT - 30),
    task_annotations={
        "app.tasks.celery_tasks.bench_instance_task": {
            "time_limit": settings.TASK_TIME_LIMIT * BENCH_TIME_FACTOR,
            "soft_time_limit": max(1, settings.TASK_TIME_LIMIT * BENCH_TIME_FACTOR - 30),
        },
    },

    # One instance per prefetch; instances vary widely in cost
    worker_prefetch_multiplier=1,
    worker_concurrency=settings.BATCH_WORKERS,
    worker_max_tasks_per_child=500,

    result_expires=settings.TASK_TIME_LIMIT * 12,
    task_track_started=True,
    task_acks_late=True,
    task_reject_on_worker_lost=True,
    task_default_retry_delay=max(1, settings.TASK_TIME_LIMIT // 10),

    worker_log_format="[%(asctime)s: %(levelname)s/%(processName)s/%(name)s] %(message)s",
    worker_task_log_format=(
        "[%(asctime)s: %(levelname)s/%(processName)s/%(name)s]"
        "[%(task_name)s(%(task_id)s)] %(message)s"
    ),
)

# Eager mode runs tasks in-process (tests, single-machine batches)
celery_app.conf.task_always_eager = settings.CELERY_TASK_ALWAYS_EAGER
celery_app.conf.task_eager_propagates = True
celery_app.conf.task_store_eager_result = True

if settings.ENVIRONMENT == "production":
    celery_app.conf.task_always_eager = False

__all__ = ["celery_app", "TASK_QUEUES"]
