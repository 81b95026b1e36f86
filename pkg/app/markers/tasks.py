"""
Celery tasks for the markers application.
"""
from celery import group, shared_task
import logging

logger = logging.getLogger(__name__)


def entity_payload(multi):
    from markers.serializers import MultiSeriesSerializer

    return MultiSeriesSerializer(multi).data


def entity_from_payload(payload):
    from markers.serializers import MultiSeriesSerializer

    serializer = MultiSeriesSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


@shared_task(name='markers.tasks.analyze_entity_task')
def analyze_entity_task(entity, config, holdout=None):
    """
    Analyze one entity.
    Takes and returns JSON payloads so the task can run on any worker;
    the result holds either a 'report' or a 'failure'.
    """
    from markers.config import validate_config
    from markers.core import EntityFailure, analyze_entity
    from markers.exceptions import MarkersError
    from markers.serializers import EntityFailureSerializer, MarkerReportSerializer

    multi = entity_from_payload(entity)
    logger.info(f"Running Celery task: analyze_entity for {multi.entity_id}")
    try:
        report = analyze_entity(
            multi,
            validate_config(config),
            entity_from_payload(holdout) if holdout is not None else None,
        )
    except MarkersError as e:
        failure = EntityFailure.from_error(multi.entity_id, e)
        return {'failure': EntityFailureSerializer(failure).data}
    return {'report': MarkerReportSerializer(report).data}


def dispatch_collection(entities, config, holdout):
    """Fan the entities out as one Celery group; outcomes come back in input order."""
    from markers.serializers import failure_from_payload, report_from_payload

    config_payload = config.echo()
    job = group(
        analyze_entity_task.s(
            entity_payload(multi),
            config_payload,
            entity_payload(holdout[multi.entity_id]) if multi.entity_id in holdout else None,
        )
        for multi in entities
    )
    logger.info(f"Dispatching {len(entities)} entities")
    results = job.apply_async().get()
    return [
        report_from_payload(result['report']) if 'report' in result
        else failure_from_payload(result['failure'])
        for result in results
    ]
